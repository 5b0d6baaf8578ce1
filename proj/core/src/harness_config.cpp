#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "mesochaos/harness.hpp"
#include "mesochaos/mollifier.hpp"

#ifndef MESOCHAOS_VERSION
#define MESOCHAOS_VERSION "0.0.0"
#endif

namespace mesochaos::harness {

namespace {

struct KindInfo {
    Kind kind;
    const char* name;
    const char* anchor;
};

constexpr KindInfo kKinds[] = {
    {Kind::bo_check, "bo-check", "Borodin-Okounkov identity for Toeplitz determinants"},
    {Kind::cue_laplace, "cue-laplace", "strong Gaussian approximation of CUE exponential moments"},
    {Kind::cue_moments, "cue-moments", "CUE chaos moments against Gaussian multiplicative chaos"},
    {Kind::sine_laplace, "sine-laplace", "sine-process Laplace asymptotics N int h + |h|^2_{H^1/2}/2"},
    {Kind::sine_gap, "sine-gap", "sine-process gap probability as a Fredholm determinant"},
    {Kind::sine_moments, "sine-moments", "sine-process chaos moments against Gaussian multiplicative chaos"},
    {Kind::gmc_simulate, "gmc-simulate", "GMC normalization and moments of the regularized measure"},
    {Kind::covariance_suite, "covariance-suite", "log-correlated asymptotics of the mollified covariance"},
    {Kind::selberg_table, "selberg-table", "Selberg and Dyson integrals for the limiting moments"},
};

const KindInfo& info(Kind k) {
    for (const auto& i : kKinds)
        if (i.kind == k) return i;
    throw DomainError("unknown experiment kind");
}

bool is_moment_kind(Kind k) {
    return k == Kind::cue_moments || k == Kind::sine_moments || k == Kind::gmc_simulate ||
           k == Kind::selberg_table;
}

std::string trim(std::string s) {
    auto sp = [](unsigned char c) { return std::isspace(c) != 0; };
    s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), sp));
    s.erase(std::find_if_not(s.rbegin(), s.rend(), sp).base(), s.end());
    return s;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// Lists arrive as comma-separated strings (INI) or arrays / scalars (JSON).
nlohmann::json normalize_value(const std::string& key, const std::string& raw) {
    static const std::vector<std::string> lists{"N", "eps", "beta", "gamma", "gamma2", "u", "lengths"};
    static const std::vector<std::string> texts{"kind", "mollifier", "out"};
    if (std::find(texts.begin(), texts.end(), key) != texts.end()) return raw;
    auto number = [&](const std::string& s) -> nlohmann::json {
        try {
            std::size_t pos = 0;
            if (s.find_first_of(".eE") == std::string::npos) {
                long long v = std::stoll(s, &pos);
                if (pos == s.size()) return v;
            }
            double v = std::stod(s, &pos);
            if (pos == s.size()) return v;
        } catch (const std::exception&) {
        }
        throw SpecError({"key '" + key + "': cannot parse '" + s + "' as a number"});
    };
    if (std::find(lists.begin(), lists.end(), key) != lists.end()) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& item : split_list(raw)) arr.push_back(number(item));
        return arr;
    }
    return number(trim(raw));
}

template <class T>
std::vector<T> as_list(const nlohmann::json& v) {
    if (v.is_array()) return v.get<std::vector<T>>();
    return {v.get<T>()};
}

}  // namespace

SpecError::SpecError(std::vector<std::string> diagnostics)
    : Error([&] {
          std::string s = "invalid experiment spec";
          for (const auto& d : diagnostics) s += "\n  - " + d;
          return s;
      }()),
      diagnostics_(std::move(diagnostics)) {}

const std::vector<Kind>& all_kinds() {
    static const std::vector<Kind> kinds = [] {
        std::vector<Kind> v;
        for (const auto& i : kKinds) v.push_back(i.kind);
        return v;
    }();
    return kinds;
}

std::string kind_name(Kind k) { return info(k).name; }

std::optional<Kind> kind_from_name(std::string_view name) {
    for (const auto& i : kKinds)
        if (name == i.name) return i.kind;
    return std::nullopt;
}

std::string anchor(Kind k) { return info(k).anchor; }

std::string version() { return MESOCHAOS_VERSION; }

void ExperimentSpec::validate() const {
    std::vector<std::string> d;
    if (N.empty()) d.push_back("N: need at least one value");
    for (int n : N)
        if (n < 1) d.push_back("N: values must be positive");
    if (!(alpha > 0 && alpha < 1)) d.push_back("alpha: must lie in (0, 1)");
    if (eps.empty()) d.push_back("eps: need at least one value");
    for (double e : eps)
        if (!(e > 0)) d.push_back("eps: values must be positive");
    if (!(ell > 0)) d.push_back("ell: must be positive");
    for (double b : beta)
        if (!(b > 0 && b < alpha)) d.push_back("beta: values must lie in (0, alpha) so that L(N) N^-alpha -> 0");
    if (gamma.empty()) d.push_back("gamma: need at least one value");
    for (double g : gamma)
        if (!(g >= 0)) d.push_back("gamma: values must be non-negative");
    if (q < 1) d.push_back("q: must be positive");
    if (!(r > 0)) d.push_back("r: must be positive");
    if (trials < 0) d.push_back("trials: must be non-negative");
    if (!(tolerance > 0)) d.push_back("tolerance: must be positive");
    std::optional<Mollifier> phi;
    try {
        phi = Mollifier::from_name(mollifier);
    } catch (const std::exception&) {
        d.push_back("mollifier: unknown name '" + mollifier + "'");
    }
    for (double g2 : gamma2)
        if (!(g2 >= 0)) d.push_back("gamma2: values must be non-negative");
    if (is_moment_kind(kind)) {
        for (double g : gamma)
            if (g * g * q >= 2.0) d.push_back("gamma^2 q must be < 2 (subcritical moments), got gamma = " + std::to_string(g));
        for (double g2 : gamma2)
            if (g2 * q >= 2.0) d.push_back("gamma^2 q must be < 2 (subcritical moments), got gamma2 = " + std::to_string(g2));
    }
    if ((kind == Kind::cue_moments || kind == Kind::sine_moments) && q != 2)
        d.push_back("q: the determinant route evaluates q = 2 only");
    if (kind == Kind::selberg_table && q > 3) d.push_back("q: selberg-table supports q <= 3");
    if ((kind == Kind::cue_laplace || kind == Kind::bo_check) && u.empty()) d.push_back("u: need at least one center");
    if (kind == Kind::sine_gap)
        for (double s : lengths)
            if (!(s > 0)) d.push_back("lengths: values must be positive");
    if ((kind == Kind::sine_laplace || kind == Kind::sine_gap || kind == Kind::sine_moments) && phi &&
        phi->kind() == MollifierKind::cauchy_like)
        d.push_back("mollifier: sine determinants need a finite-range mollifier (gaussian or smooth_bump)");
    if (!d.empty()) throw SpecError(std::move(d));
}

nlohmann::json ExperimentSpec::to_json() const {
    return {{"kind", kind_name(kind)}, {"N", N},           {"alpha", alpha},   {"eps", eps},
            {"ell", ell},              {"beta", beta},     {"gamma", gamma},   {"gamma2", gamma2}, {"q", q},
            {"u", u},                  {"lengths", lengths}, {"r", r},         {"trials", trials},
            {"mollifier", mollifier},  {"seed", seed},     {"tolerance", tolerance}, {"out", out}};
}

ExperimentSpec ExperimentSpec::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw SpecError({"spec must be an object"});
    ExperimentSpec s;
    std::vector<std::string> d;
    // Sections may nest one level; keys are flattened.
    nlohmann::json flat = nlohmann::json::object();
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (it.value().is_object())
            for (auto jt = it.value().begin(); jt != it.value().end(); ++jt) flat[jt.key()] = jt.value();
        else
            flat[it.key()] = it.value();
    }
    for (auto it = flat.begin(); it != flat.end(); ++it) {
        const std::string& k = it.key();
        const auto& v = it.value();
        try {
            if (k == "kind") {
                auto kk = kind_from_name(v.get<std::string>());
                if (!kk) d.push_back("kind: unknown experiment '" + v.get<std::string>() + "'");
                else s.kind = *kk;
            } else if (k == "N") s.N = as_list<int>(v);
            else if (k == "alpha") s.alpha = v.get<double>();
            else if (k == "eps") s.eps = as_list<double>(v);
            else if (k == "ell") s.ell = v.get<double>();
            else if (k == "beta") s.beta = as_list<double>(v);
            else if (k == "gamma") s.gamma = as_list<double>(v);
            else if (k == "gamma2") s.gamma2 = as_list<double>(v);
            else if (k == "q") s.q = v.get<int>();
            else if (k == "u") s.u = as_list<double>(v);
            else if (k == "lengths") s.lengths = as_list<double>(v);
            else if (k == "r") s.r = v.get<double>();
            else if (k == "trials") s.trials = v.get<long>();
            else if (k == "mollifier") s.mollifier = v.get<std::string>();
            else if (k == "seed") s.seed = v.get<std::uint64_t>();
            else if (k == "tolerance") s.tolerance = v.get<double>();
            else if (k == "out") s.out = v.get<std::string>();
            else d.push_back("unknown key '" + k + "'");
        } catch (const nlohmann::json::exception&) {
            d.push_back("key '" + k + "': wrong type");
        }
    }
    if (!flat.contains("kind")) d.push_back("kind: missing");
    if (!d.empty()) throw SpecError(std::move(d));
    return s;
}

ExperimentSpec parse_config(const std::string& text) {
    auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::parse_error& e) {
            throw SpecError({std::string("JSON: ") + e.what()});
        }
        return ExperimentSpec::from_json(j);
    }
    boost::property_tree::ptree tree;
    std::istringstream in(text);
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser::ini_parser_error& e) {
        throw SpecError({"line " + std::to_string(e.line()) + ": " + e.message()});
    }
    nlohmann::json flat = nlohmann::json::object();
    std::vector<std::string> d;
    auto put = [&](const std::string& key, const std::string& raw) {
        try {
            flat[key] = normalize_value(key, trim(raw));
        } catch (const SpecError& e) {
            d.insert(d.end(), e.diagnostics().begin(), e.diagnostics().end());
        }
    };
    for (const auto& [key, node] : tree) {
        if (node.empty()) put(key, node.data());
        else
            for (const auto& [sub, leaf] : node) put(sub, leaf.data());
    }
    if (d.empty()) return ExperimentSpec::from_json(flat);
    try {
        ExperimentSpec::from_json(flat);
    } catch (const SpecError& e) {
        d.insert(d.end(), e.diagnostics().begin(), e.diagnostics().end());
    }
    throw SpecError(std::move(d));
}

ExperimentSpec load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw SpecError({"cannot open config file " + path.string()});
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

nlohmann::json condition_flags(const ExperimentSpec& spec) {
    nlohmann::json rows = nlohmann::json::array();
    const double emin = spec.eps.empty() ? 1.0 : *std::min_element(spec.eps.begin(), spec.eps.end());
    for (int n : spec.N) {
        const double na = std::pow(static_cast<double>(n), spec.alpha);
        nlohmann::json r{{"N", n}, {"c1_ratio", std::pow(static_cast<double>(n), spec.alpha - 1.0) / emin},
                         {"window_ratio", spec.ell / na}};
        if (!spec.beta.empty() && n > 1) {
            nlohmann::json c2 = nlohmann::json::array();
            for (double b : spec.beta) c2.push_back(std::pow(static_cast<double>(n), b) / (na * std::log(static_cast<double>(n))));
            r["c2_ratio"] = c2;
        }
        rows.push_back(r);
    }
    return rows;
}

std::filesystem::path output_directory(const std::string& explicit_dir) {
    if (!explicit_dir.empty()) return explicit_dir;
    if (const char* env = std::getenv("MESOCHAOS_OUT"); env && *env) return env;
    return "results";
}

}  // namespace mesochaos::harness
