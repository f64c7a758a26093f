#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "fprw/cli.hpp"

namespace fprw {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
    if (!j.is_object()) fail(where + " must be an object");
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : j.items())
        if (!allowed.count(k)) fail("unknown field '" + k + "' in " + where);
}

const json& need(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) fail("missing field '" + std::string(key) + "' in " + where);
    return j.at(key);
}

double number(const json& j, const std::string& what) {
    if (!j.is_number()) fail(what + " must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(what + " must be finite");
    return v;
}

ExtReal ext_number(const json& j, const std::string& what) {
    if (j.is_string() && j.get<std::string>() == "inf") return ExtReal::infinity();
    return ExtReal(number(j, what));
}

std::vector<double> numbers(const json& j, const std::string& what) {
    if (!j.is_array()) fail(what + " must be an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], what + "[" + std::to_string(i) + "]"));
    return out;
}

long long integer(const json& j, const std::string& what) {
    if (!j.is_number_integer() && !j.is_number_unsigned()) fail(what + " must be an integer");
    return j.get<long long>();
}

std::size_t count(const json& j, const std::string& what) {
    const long long v = integer(j, what);
    if (v < 0) fail(what + " must be nonnegative");
    return static_cast<std::size_t>(v);
}

std::vector<std::vector<int>> int_matrix(const json& j, const std::string& what) {
    if (!j.is_array()) fail(what + " must be a matrix");
    std::vector<std::vector<int>> out;
    for (const auto& row : j) {
        if (!row.is_array()) fail(what + " rows must be arrays");
        std::vector<int> r;
        for (const auto& x : row) r.push_back(static_cast<int>(integer(x, what)));
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace

FactorSpec parse_factor(const json& j) {
    if (!j.is_object()) fail("factor must be an object");
    const std::string type = need(j, "type", "factor").is_string() ? j.at("type").get<std::string>() : "";
    const std::string where = "factor of type '" + type + "'";
    if (type == "lattice") {
        only_keys(j, where, {"type", "dim", "beta", "p"});
        if (j.contains("dim")) {
            if (j.contains("beta")) fail("lattice takes either 'dim' or 'beta', not both");
            const long long d = integer(j.at("dim"), "lattice.dim");
            if (d < 1) fail("lattice.dim must be >= 1");
            LatticeSpec s = LatticeSpec::simple(static_cast<int>(d));
            if (j.contains("p")) {
                const auto p = numbers(j.at("p"), "lattice.p");
                if (p.size() != s.p.size()) fail("lattice.p length must equal dim");
                s.p = p;
            }
            return s;
        }
        LatticeSpec s{numbers(need(j, "beta", where), "lattice.beta"), {}};
        s.p = j.contains("p") ? numbers(j.at("p"), "lattice.p") : std::vector<double>(s.beta.size(), 0.5);
        return s;
    }
    if (type == "cyclic") {
        only_keys(j, where, {"type", "order", "mu"});
        const long long n = integer(need(j, "order", where), "cyclic.order");
        if (n < 2) fail("cyclic.order must be >= 2");
        std::vector<double> mu(static_cast<std::size_t>(n), 0.0);
        if (j.contains("mu")) {
            mu = numbers(j.at("mu"), "cyclic.mu");
        } else if (n == 2) {
            mu[1] = 1.0;
        } else {
            mu[1] = 0.5;
            mu[static_cast<std::size_t>(n - 1)] = 0.5;
        }
        return FiniteGroupSpec::cyclic(static_cast<int>(n), mu);
    }
    if (type == "finite_group") {
        only_keys(j, where, {"type", "table", "identity", "P", "mu"});
        auto table = int_matrix(need(j, "table", where), "finite_group.table");
        const int id = j.contains("identity") ? static_cast<int>(integer(j.at("identity"), "finite_group.identity")) : 0;
        if (j.contains("P") == j.contains("mu")) fail("finite_group takes exactly one of 'P' or 'mu'");
        if (j.contains("mu")) {
            FiniteGroupSpec g{std::move(table), id, numbers(j.at("mu"), "finite_group.mu")};
            g.validate();
            return g;
        }
        std::vector<std::vector<double>> P;
        for (const auto& row : j.at("P")) P.push_back(numbers(row, "finite_group.P"));
        return FiniteGroupSpec::from_matrix(std::move(table), id, P);
    }
    if (type == "tree") {
        only_keys(j, where, {"type", "q"});
        HomTreeSpec t{static_cast<int>(integer(need(j, "q", where), "tree.q"))};
        t.validate();
        return t;
    }
    if (type == "explicit") {
        only_keys(j, where, {"type", "coeffs", "radius", "g_at_r", "gprime_at_r", "sing", "period", "psi_limit"});
        ExplicitSpec e;
        e.coeffs = numbers(need(j, "coeffs", where), "explicit.coeffs");
        e.radius = number(need(j, "radius", where), "explicit.radius");
        e.g_at_r = ext_number(need(j, "g_at_r", where), "explicit.g_at_r");
        e.gprime_at_r = ext_number(need(j, "gprime_at_r", where), "explicit.gprime_at_r");
        if (j.contains("sing") && !j.at("sing").is_null()) {
            const json& s = j.at("sing");
            only_keys(s, "explicit.sing", {"q", "k"});
            e.sing = make_singularity(number(need(s, "q", "explicit.sing"), "sing.q"),
                                      static_cast<int>(integer(need(s, "k", "explicit.sing"), "sing.k")));
        }
        e.period = j.contains("period") ? static_cast<int>(integer(j.at("period"), "explicit.period")) : 1;
        if (j.contains("psi_limit")) e.psi_limit = number(j.at("psi_limit"), "explicit.psi_limit");
        e.validate();
        return e;
    }
    fail("unknown factor type '" + type + "'");
}

Config parse_config(const json& j) {
    only_keys(j, "config", {"factors", "weights", "options"});
    Config cfg;
    const json& fs = need(j, "factors", "config");
    if (!fs.is_array()) fail("factors must be an array");
    for (std::size_t i = 0; i < fs.size(); ++i) {
        try {
            cfg.product.factors.push_back(parse_factor(fs[i]));
        } catch (const Error& e) {
            std::string msg = e.what();
            if (e.code() == ErrorCode::ConfigError) msg = msg.substr(msg.find(": ") + 2);
            fail("factors[" + std::to_string(i) + "]: " + msg);
        }
    }
    if (cfg.product.factors.size() < 2) fail("at least two factors are required");
    cfg.product.weights = numbers(need(j, "weights", "config"), "weights");
    if (cfg.product.weights.size() != cfg.product.factors.size()) fail("weights must have one entry per factor");
    double sum = 0.0;
    for (double w : cfg.product.weights) {
        if (!(w > 0.0)) fail("weights must be positive");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        for (double& w : cfg.product.weights) w /= sum;
        cfg.warnings.push_back("weights summed to " + format_number(sum) + " and were normalised");
    }
    if (j.contains("options")) {
        const json& o = j.at("options");
        only_keys(o, "options", {"order", "grid", "critical_tol", "warning_band", "seed", "steps", "walks"});
        RunOptions& r = cfg.options;
        if (o.contains("order")) r.order = count(o.at("order"), "options.order");
        if (o.contains("grid")) r.grid = count(o.at("grid"), "options.grid");
        if (o.contains("critical_tol")) r.critical_tol = number(o.at("critical_tol"), "options.critical_tol");
        if (o.contains("warning_band")) r.warning_band = number(o.at("warning_band"), "options.warning_band");
        if (o.contains("seed")) r.seed = static_cast<std::uint64_t>(count(o.at("seed"), "options.seed"));
        if (o.contains("steps")) r.steps = count(o.at("steps"), "options.steps");
        if (o.contains("walks")) r.walks = static_cast<std::uint64_t>(count(o.at("walks"), "options.walks"));
        if (r.grid < 3) fail("options.grid must be >= 3");
        if (!(r.critical_tol > 0.0) || !(r.warning_band >= r.critical_tol))
            fail("options need 0 < critical_tol <= warning_band");
    }
    return cfg;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

std::string format_number(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

json json_number(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (std::isnan(x)) return nullptr;
    return std::stod(format_number(x));
}

json json_number(const ExtReal& x) { return json_number(x.ieee()); }

}  // namespace fprw
