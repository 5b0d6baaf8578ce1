#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "mesochaos/cue.hpp"
#include "mesochaos/covariance.hpp"
#include "mesochaos/gaussian_field.hpp"
#include "mesochaos/harness.hpp"
#include "mesochaos/quadrature.hpp"
#include "mesochaos/sine.hpp"
#include "mesochaos/specfun.hpp"

namespace mesochaos::harness {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

using Row = std::vector<Cell>;

struct Task {
    Row key;  // leading cells, used for the failure row
    std::function<std::vector<Row>()> body;
};

struct Plan {
    std::vector<Column> columns;
    std::vector<Task> tasks;
};

Column integer(std::string n) { return {std::move(n), ColumnType::integer}; }
Column real(std::string n) { return {std::move(n), ColumnType::real}; }
Column text(std::string n) { return {std::move(n), ColumnType::text}; }

Cell blank(ColumnType t) {
    switch (t) {
    case ColumnType::integer: return std::int64_t{0};
    case ColumnType::real: return kNaN;
    case ColumnType::text: return std::string{};
    }
    return kNaN;
}

std::string error_code(const std::exception& e) {
    if (dynamic_cast<const DomainError*>(&e)) return "domain_error";
    if (dynamic_cast<const DivergenceError*>(&e)) return "divergence";
    if (dynamic_cast<const ConvergenceError*>(&e)) return "convergence";
    if (dynamic_cast<const NumericalBreakdown*>(&e)) return "breakdown";
    return "error";
}

std::string sanitize(std::string s) {
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

// Log of the sample mean of exp(x) and its delta-method standard error.
struct LogMean {
    double value = kNaN;
    double se = kNaN;
};

LogMean log_mean_exp(const std::vector<double>& x) {
    if (x.empty()) return {};
    const double m = *std::max_element(x.begin(), x.end());
    double s = 0.0, s2 = 0.0;
    for (double v : x) {
        double e = std::exp(v - m);
        s += e;
        s2 += e * e;
    }
    const double n = static_cast<double>(x.size());
    const double mean = s / n;
    const double var = std::max(0.0, s2 / n - mean * mean) * n / std::max(1.0, n - 1.0);
    return {m + std::log(mean), std::sqrt(var / n) / mean};
}

struct MeanSe {
    double mean = kNaN;
    double se = kNaN;
};

MeanSe mean_se(const std::vector<double>& x) {
    if (x.empty()) return {};
    const double n = static_cast<double>(x.size());
    const double m = std::accumulate(x.begin(), x.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return {m, n > 1 ? std::sqrt(ss / (n - 1) / n) : kNaN};
}

double z_score(double a, double b, double se) { return se > 0 ? (a - b) / se : kNaN; }

std::vector<double> ell_values(const ExperimentSpec& spec, int N) {
    if (spec.beta.empty()) return {spec.ell};
    std::vector<double> out;
    for (double b : spec.beta) out.push_back(std::pow(static_cast<double>(N), b));
    return out;
}

double beta_of(const ExperimentSpec& spec, std::size_t i) { return spec.beta.empty() ? kNaN : spec.beta[i]; }

// Composite Gauss-Legendre nodes on [0, r] resolving the scale eps.
QuadratureRule mass_rule(double r, double eps) {
    std::vector<double> edges{0.0, r};
    return composite_gauss_legendre(edges, 6, std::max(eps, 1e-3));
}

// ---- bo-check

std::vector<std::pair<std::string, cue::ToeplitzSymbol>> reference_symbols(int N, const ExperimentSpec& spec) {
    using cue::cplx;
    std::vector<std::pair<std::string, cue::ToeplitzSymbol>> out;
    out.emplace_back("trigonometric", cue::ToeplitzSymbol::real_symbol({0.3, 0.5, 0.2}));
    out.emplace_back("complex-band",
                     cue::ToeplitzSymbol::real_symbol({0.0, cplx(0.4, 0.3), 0.1, cplx(0.0, -0.05)}));
    std::vector<cplx> geo{0.8};
    for (int k = 1; k <= 60; ++k) geo.push_back(0.8 * std::pow(0.6, k));
    out.emplace_back("geometric", cue::ToeplitzSymbol::real_symbol(geo));
    for (double g : {0.5, 1.0}) {
        cue::MesoscopicStatistic s;
        s.N = N;
        s.alpha = spec.alpha;
        s.centers = spec.u;
        s.weights.assign(spec.u.size(), 1.0);
        s.scales.assign(spec.u.size(), spec.eps.front());
        s.gamma = g;
        s.ell = spec.ell;
        s.mollifier = Mollifier::from_name(spec.mollifier);
        out.emplace_back(g == 0.5 ? "mesoscopic-weak" : "mesoscopic-strong", cue::symbol_coeffs(s));
    }
    return out;
}

Plan plan_bo_check(const ExperimentSpec& spec) {
    Plan p;
    p.columns = {text("symbol"), integer("N"),         real("log_det"), real("log_bo"),
                 real("residual"), integer("hankel_size"), real("hs_tail")};
    const std::vector<std::string> names{"trigonometric", "complex-band", "geometric", "mesoscopic-weak",
                                         "mesoscopic-strong"};
    for (std::size_t s = 0; s < names.size(); ++s)
        for (int N : spec.N)
            p.tasks.push_back({{names[s], std::int64_t{N}}, [=, &spec]() -> std::vector<Row> {
                                   auto sym = reference_symbols(N, spec)[s].second;
                                   LogDet ld = cue::toeplitz_laplace(N, sym);
                                   auto bo = cue::bo_rhs(N, sym);
                                   return {{names[s], std::int64_t{N}, ld.log_abs, bo.log_value,
                                            std::abs(ld.log_abs - bo.log_value), std::int64_t{bo.hankel_size},
                                            cue::hs_tail(sym, N)}};
                               }});
    return p;
}

// ---- cue-laplace

cue::MesoscopicStatistic two_point(const ExperimentSpec& spec, int N) {
    cue::MesoscopicStatistic s;
    s.N = N;
    s.alpha = spec.alpha;
    s.centers = spec.u;
    s.weights.assign(spec.u.size(), 1.0);
    s.scales.assign(spec.u.size(), spec.eps.front());
    s.gamma = spec.gamma.front();
    s.ell = spec.ell;
    s.mollifier = Mollifier::from_name(spec.mollifier);
    return s;
}

Plan plan_cue_laplace(const ExperimentSpec& spec) {
    Plan p;
    p.columns = {integer("N"),     real("alpha"),      real("eps"),   real("log_det"), real("mean"),
                 real("centered"), real("prediction"), real("error"), real("variance"), real("c1_ratio"),
                 real("periodization_bound"), real("mc_log_laplace"), real("mc_se"), real("mc_z")};
    for (int N : spec.N)
        p.tasks.push_back({{std::int64_t{N}}, [=, &spec]() -> std::vector<Row> {
                               auto stat = two_point(spec, N);
                               auto sym = cue::symbol_coeffs(stat);
                               LogDet ld = cue::toeplitz_laplace(N, sym);
                               const double mean = N * sym.coeff(0).real();
                               const double centered = ld.log_abs - mean;
                               const double pred = cue::gaussian_prediction(stat);
                               LogMean mc;
                               if (spec.trials > 0) {
                                   std::vector<double> x;
                                   for (long t = 0; t < spec.trials; ++t)
                                       x.push_back(cue::smoothed_statistic(cue::sample_cue(N, spec.seed, t), stat).value -
                                                   mean);
                                   mc = log_mean_exp(x);
                               }
                               return {{std::int64_t{N}, spec.alpha, spec.eps.front(), ld.log_abs, mean, centered, pred,
                                        centered - pred, cue::exact_variance(sym, N), stat.c1_ratio(),
                                        stat.periodization_bound(), mc.value, mc.se,
                                        z_score(mc.value, centered, mc.se)}};
                           }});
    return p;
}

// ---- cue-moments and sine-moments

std::vector<Column> moment_columns() {
    return {integer("N"),        real("beta"),        real("ell"),      real("gamma"),       real("eps"),
            real("moment"),      real("moment_error"), real("gaussian"), real("gaussian_error"), real("ratio"),
            real("mc_mass"),     real("mc_mass_se"),  real("mc_moment"), real("mc_moment_se")};
}

template <class Exact, class Mc>
Plan plan_moments(const ExperimentSpec& spec, Exact exact, Mc mc) {
    Plan p;
    p.columns = moment_columns();
    for (int N : spec.N) {
        auto ells = ell_values(spec, N);
        for (std::size_t b = 0; b < ells.size(); ++b)
            for (double g : spec.gamma) {
                const double ell = ells[b], beta = beta_of(spec, b);
                p.tasks.push_back({{std::int64_t{N}, beta, ell, g}, [=, &spec]() -> std::vector<Row> {
                                       const double eps = spec.eps.front();
                                       Estimate m = exact(N, ell, g);
                                       field::Weight w{0.0, spec.r, {}};
                                       Estimate gm = field::exact_gaussian_moment(
                                           2, g, w, eps, Mollifier::from_name(spec.mollifier), {ell});
                                       std::vector<double> masses;
                                       if (spec.trials > 0) masses = mc(N, ell, g);
                                       std::vector<double> sq;
                                       for (double v : masses) sq.push_back(v * v);
                                       MeanSe ms = mean_se(masses), m2 = mean_se(sq);
                                       return {{std::int64_t{N}, beta, ell, g, eps, m.value, m.error, gm.value,
                                                gm.error, m.value / gm.value, ms.mean, ms.se, m2.mean, m2.se}};
                                   }});
            }
    }
    return p;
}

Plan plan_cue_moments(const ExperimentSpec& spec) {
    auto setting = [&spec](int N, double ell, double g) {
        cue::ChaosSetting s;
        s.N = N;
        s.alpha = spec.alpha;
        s.eps = spec.eps.front();
        s.ell = ell;
        s.gamma = g;
        s.mollifier = Mollifier::from_name(spec.mollifier);
        return s;
    };
    auto exact = [&spec, setting](int N, double ell, double g) {
        return cue::cue_second_moment(setting(N, ell, g), spec.r);
    };
    auto mc = [&spec, setting](int N, double ell, double g) {
        auto s = setting(N, ell, g);
        auto rule = mass_rule(spec.r, s.eps);
        std::vector<double> masses;
        for (long t = 0; t < spec.trials; ++t) {
            auto dens = cue::cue_chaos_measure({cue::sample_cue(N, spec.seed, t)}, s, rule.nodes).front();
            double m = 0.0;
            for (std::size_t i = 0; i < dens.size(); ++i) m += rule.weights[i] * dens[i];
            masses.push_back(m);
        }
        return masses;
    };
    return plan_moments(spec, exact, mc);
}

Plan plan_sine_moments(const ExperimentSpec& spec) {
    auto setting = [&spec](int N, double ell, double g) {
        sine::SineChaosSetting s;
        s.N = N;
        s.eps = spec.eps.front();
        s.ell = ell;
        s.gamma = g;
        s.mollifier = Mollifier::from_name(spec.mollifier);
        return s;
    };
    auto exact = [&spec, setting](int N, double ell, double g) {
        return sine::sine_second_moment(setting(N, ell, g), spec.r);
    };
    auto mc = [&spec, setting](int N, double ell, double g) {
        auto s = setting(N, ell, g);
        auto support = s.point(0.0).test_function();
        sine::WindowSampler sampler(N, support.a, spec.r + support.b);
        auto rule = mass_rule(spec.r, s.eps);
        std::vector<double> masses;
        for (long t = 0; t < spec.trials; ++t) {
            auto dens = sine::sine_chaos_measure({sampler.sample(spec.seed, t)}, s, rule.nodes).front();
            double m = 0.0;
            for (std::size_t i = 0; i < dens.size(); ++i) m += rule.weights[i] * dens[i];
            masses.push_back(m);
        }
        return masses;
    };
    return plan_moments(spec, exact, mc);
}

// ---- sine-laplace

Plan plan_sine_laplace(const ExperimentSpec& spec) {
    Plan p;
    p.columns = {integer("N"), real("width"), real("amplitude"), real("log_laplace"), real("log_laplace_error"),
                 integer("order"), real("prediction"), real("error"), real("abs_error")};
    const double s = spec.eps.front(), c = spec.gamma.front();
    for (int N : spec.N)
        p.tasks.push_back({{std::int64_t{N}}, [=]() -> std::vector<Row> {
                               sine::TestFunction h{[=](double x) { return c * std::exp(-0.5 * x * x / (s * s)); },
                                                    -10.0 * s, 10.0 * s};
                               auto lap = sine::laplace_transform(h, N);
                               const double pred = sine::asymp_prediction(h, N, s / 200.0);
                               const double err = lap.value - pred;
                               return {{std::int64_t{N}, s, c, lap.value, lap.error, std::int64_t{lap.order}, pred, err,
                                        std::abs(err)}};
                           }});
    return p;
}

// ---- sine-gap

Plan plan_sine_gap(const ExperimentSpec& spec) {
    Plan p;
    p.columns = {integer("N"),   real("length"), real("log_gap"), real("gap"),  real("gap_error"),
                 real("mc_gap"), real("mc_se"),  real("mc_z"),    real("expected_count"), real("mc_count")};
    for (int N : spec.N)
        for (double len : spec.lengths)
            p.tasks.push_back({{std::int64_t{N}, len}, [=, &spec]() -> std::vector<Row> {
                                   auto g = sine::gap_probability(N, 0.0, len);
                                   const double gap = std::exp(g.value);
                                   MeanSe empty, count;
                                   if (spec.trials > 0) {
                                       sine::WindowSampler sampler(N, 0.0, len);
                                       std::vector<double> e, c;
                                       for (long t = 0; t < spec.trials; ++t) {
                                           auto pts = sampler.sample(spec.seed, t);
                                           e.push_back(pts.empty() ? 1.0 : 0.0);
                                           c.push_back(static_cast<double>(pts.size()));
                                       }
                                       empty = mean_se(e);
                                       count = mean_se(c);
                                   }
                                   return {{std::int64_t{N}, len, g.value, gap, gap * g.error, empty.mean, empty.se,
                                            z_score(empty.mean, gap, empty.se), N * len, count.mean}};
                               }});
    return p;
}

// ---- gmc-simulate

Plan plan_gmc(const ExperimentSpec& spec) {
    Plan p;
    p.columns = {real("gamma"),        real("eps"),          integer("q"),       integer("trials"),
                 real("mass_mean"),    real("mass_se"),      real("mass_target"), real("mass_z"),
                 real("moment_mc"),    real("moment_se"),    real("moment_exact"), real("moment_exact_error"),
                 real("moment_z")};
    if (spec.trials <= 0) return p;
    for (double g : spec.gamma)
        p.tasks.push_back({{g}, [=, &spec]() -> std::vector<Row> {
                               const double eps = spec.eps.front();
                               const auto phi = Mollifier::from_name(spec.mollifier);
                               const covariance::KernelParams kp{spec.ell};
                               field::Weight w{0.0, spec.r, {}};
                               auto plan = field::SpectralSynthesisPlan::make(0.0, spec.r, eps, phi, kp);
                               std::vector<double> m, mq;
                               for (long t = 0; t < spec.trials; ++t) {
                                   auto f = field::sample_field(plan, spec.seed, t);
                                   double v = field::mass(field::gmc_density(f, g), w);
                                   m.push_back(v);
                                   mq.push_back(std::pow(v, spec.q));
                               }
                               MeanSe ms = mean_se(m), qs = mean_se(mq);
                               Estimate ex = field::exact_gaussian_moment(spec.q, g, w, eps, phi, kp);
                               const double target = w.integral();
                               const double se = std::hypot(qs.se, ex.error);
                               return {{g, eps, std::int64_t{spec.q}, std::int64_t{spec.trials}, ms.mean, ms.se, target,
                                        z_score(ms.mean, target, ms.se), qs.mean, qs.se, ex.value, ex.error,
                                        z_score(qs.mean, ex.value, se)}};
                           }});
    return p;
}

nlohmann::json density_snapshot(const ExperimentSpec& spec) {
    const auto phi = Mollifier::from_name(spec.mollifier);
    auto plan = field::SpectralSynthesisPlan::make(0.0, spec.r, spec.eps.front(), phi, {spec.ell});
    auto dens = field::gmc_density(field::sample_field(plan, spec.seed, 0), spec.gamma.front());
    nlohmann::json x = nlohmann::json::array(), y = nlohmann::json::array();
    const std::size_t stride = std::max<std::size_t>(1, dens.size() / 512);
    for (std::size_t i = 0; i < dens.size(); i += stride) {
        double u = dens.x(i);
        if (u < 0.0 || u > spec.r) continue;
        x.push_back(u);
        y.push_back(dens.values[i].real());
    }
    return {{"x", x}, {"y", y}, {"gamma", spec.gamma.front()}, {"trial", 0}};
}

// ---- covariance-suite

Plan plan_covariance(const ExperimentSpec& spec) {
    Plan p;
    p.columns = {text("part"), real("separation"), real("eps"), real("delta"), real("value"), real("ratio")};
    p.tasks.push_back({{std::string("suite")}, [&spec]() -> std::vector<Row> {
                           covariance::SuiteOptions o;
                           if (spec.eps.size() >= 2) o.scales = spec.eps;
                           auto rep = covariance::assumption_suite(Mollifier::from_name(spec.mollifier), {spec.ell}, o);
                           std::vector<Row> rows;
                           auto scalar = [&](const char* name, double v) {
                               rows.push_back({std::string(name), kNaN, kNaN, kNaN, v, kNaN});
                           };
                           scalar("domination_constant", rep.domination_constant);
                           scalar("q_eps_constant", rep.q_eps_constant);
                           scalar("edge_gap", rep.edge_gap);
                           scalar("lattice_points", static_cast<double>(rep.lattice_points));
                           scalar("band_width", rep.band_width());
                           scalar("worst_halving_ratio", rep.worst_halving_ratio());
                           for (const auto& r : rep.off_diagonal)
                               rows.push_back({std::string("off_diagonal"), r.separation, r.eps, r.eps, r.discrepancy,
                                               r.ratio});
                           for (const auto& r : rep.near_diagonal)
                               rows.push_back({std::string("near_diagonal"), r.separation, r.eps, r.delta, r.offset,
                                               kNaN});
                           return rows;
                       }});
    return p;
}

// ---- selberg-table

Plan plan_selberg(const ExperimentSpec& spec) {
    Plan p;
    p.columns = {text("family"), integer("q"), real("gamma2"), real("closed_form"), real("quadrature"),
                 real("quadrature_error"), real("rel_gap"), real("z")};
    std::vector<double> g2 = spec.gamma2;
    if (g2.empty())
        for (double g : spec.gamma) g2.push_back(g * g);
    for (const char* family : {"selberg-interval", "dyson-circle"})
        for (double v : g2)
            p.tasks.push_back({{std::string(family), std::int64_t{spec.q}, v}, [=, &spec]() -> std::vector<Row> {
                                   const double g = std::sqrt(v);
                                   const bool circle = std::string(family) == "dyson-circle";
                                   LogValue closed = circle ? specfun::dyson_circle(spec.q, g)
                                                            : specfun::selberg_interval_moment(spec.q, g, spec.r);
                                   Estimate quad = circle ? specfun::dyson_circle_quadrature(spec.q, g)
                                                          : specfun::selberg_interval_quadrature(spec.q, g, spec.r);
                                   const double gap = std::abs(quad.value - closed.value);
                                   return {{std::string(family), std::int64_t{spec.q}, v, closed.value, quad.value,
                                            quad.error, gap / std::abs(closed.value),
                                            quad.error > 0 ? gap / quad.error : kNaN}};
                               }});
    return p;
}

Plan make_plan(const ExperimentSpec& spec) {
    switch (spec.kind) {
    case Kind::bo_check: return plan_bo_check(spec);
    case Kind::cue_laplace: return plan_cue_laplace(spec);
    case Kind::cue_moments: return plan_cue_moments(spec);
    case Kind::sine_laplace: return plan_sine_laplace(spec);
    case Kind::sine_gap: return plan_sine_gap(spec);
    case Kind::sine_moments: return plan_sine_moments(spec);
    case Kind::gmc_simulate: return plan_gmc(spec);
    case Kind::covariance_suite: return plan_covariance(spec);
    case Kind::selberg_table: return plan_selberg(spec);
    }
    throw DomainError("unknown experiment kind");
}

std::vector<Row> execute(const Task& task, const std::vector<Column>& columns) {
    try {
        auto rows = task.body();
        for (auto& r : rows) {
            if (r.size() + 1 != columns.size()) throw DomainError("internal: row width differs from columns");
            r.emplace_back(std::string("ok"));
        }
        return rows;
    } catch (const std::exception& e) {
        Row r = task.key;
        while (r.size() + 1 < columns.size()) r.push_back(blank(columns[r.size()].type));
        r.emplace_back(error_code(e) + ": " + sanitize(e.what()));
        return {r};
    }
}

}  // namespace

ResultRecord run(const ExperimentSpec& spec, int threads) {
    spec.validate();
    const auto start = std::chrono::steady_clock::now();
    ResultRecord rec;
    rec.spec = spec;
    rec.version = version();
    Plan plan = make_plan(spec);
    plan.columns.push_back(text("status"));
    rec.columns = plan.columns;

    std::vector<std::vector<Row>> results(plan.tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next++) < plan.tasks.size();) results[i] = execute(plan.tasks[i], plan.columns);
    };
    const int n = std::clamp(threads, 1, static_cast<int>(std::max<std::size_t>(1, plan.tasks.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    for (auto& rows : results)
        for (auto& r : rows) rec.rows.push_back(std::move(r));

    rec.metadata["kind"] = kind_name(spec.kind);
    rec.metadata["anchor"] = anchor(spec.kind);
    rec.metadata["condition_flags"] = condition_flags(spec);
    rec.metadata["seed"] = spec.seed;
    std::size_t failed = 0;
    for (const auto& s : rec.text_column("status"))
        if (s != "ok") ++failed;
    rec.metadata["failed_rows"] = failed;
    if (spec.kind == Kind::gmc_simulate && spec.trials > 0) {
        try {
            rec.metadata["density_snapshot"] = density_snapshot(spec);
        } catch (const std::exception& e) {
            rec.metadata["density_snapshot_error"] = e.what();
        }
    }
    rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

}  // namespace mesochaos::harness
