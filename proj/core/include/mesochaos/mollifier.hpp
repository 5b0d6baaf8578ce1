#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace mesochaos {

enum class MollifierKind { gaussian, cauchy_like, smooth_bump };

// Even probability density phi used as phi_eps(x) = phi(x/eps)/eps, with its Fourier transform
// phi^(kappa) = int e^{-2 pi i kappa x} phi(x) dx (real because phi is even).
class Mollifier {
public:
    static Mollifier gaussian();     // standard normal
    static Mollifier cauchy_like();  // 1/(pi(1+x^2)), finite |x|^alpha moments only for alpha < 1
    static Mollifier smooth_bump();  // C exp(-1/(1-x^2)) on (-1, 1)
    static Mollifier from_name(std::string_view name);

    MollifierKind kind() const { return kind_; }
    std::string name() const;

    double density(double x) const;
    double cdf(double x) const;
    double fourier(double kappa) const;

    // Declared alpha: int |x|^alpha phi(x) dx < infinity.
    double moment_order() const;
    // phi extends analytically to |Im z| < width; nullopt when it is not analytic on R.
    std::optional<double> strip_half_width() const;
    // |phi^(kappa)| < tol for |kappa| > frequency_cutoff(tol).
    double frequency_cutoff(double tol) const;
    // Mass of phi outside [-R, R] is below tol.
    double tail_radius(double tol) const;

private:
    struct BumpTables;
    explicit Mollifier(MollifierKind k);
    MollifierKind kind_;
    std::shared_ptr<const BumpTables> bump_;
};

}  // namespace mesochaos
