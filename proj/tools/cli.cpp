// Copyright 2026 The frachelm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <variant>

#include "frachelm/diagnostics.hpp"
#include "frachelm/oracle.hpp"
#include "frachelm/parallel.hpp"
#include "frachelm/specfun.hpp"

namespace frachelm::cli {
namespace {

using json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Strict reader over one JSON object. Every key read is remembered so that
// finish() can reject the ones nobody asked for.
class Reader {
public:
    Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw UsageError(where_ + ": expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& raw(const std::string& key) {
        const json* v = find(key);
        if (!v) fail(key, "missing required key");
        return *v;
    }

    double number(const std::string& key, std::optional<double> def = std::nullopt) {
        const json* v = find(key);
        if (!v) return required(key, def);
        return as_number(*v, key);
    }

    int integer(const std::string& key, std::optional<int> def = std::nullopt) {
        const json* v = find(key);
        if (!v) return required(key, def);
        if (!v->is_number_integer()) fail(key, "expected an integer");
        return v->get<int>();
    }

    std::string text(const std::string& key, std::optional<std::string> def = std::nullopt) {
        const json* v = find(key);
        if (!v) return required(key, def);
        if (!v->is_string()) fail(key, "expected a string");
        return v->get<std::string>();
    }

    bool boolean(const std::string& key, bool def) {
        const json* v = find(key);
        if (!v) return def;
        if (!v->is_boolean()) fail(key, "expected true or false");
        return v->get<bool>();
    }

    // A single number is accepted as a one-element list.
    std::vector<double> numbers(const std::string& key, std::optional<std::vector<double>> def = std::nullopt) {
        const json* v = find(key);
        if (!v) return required(key, def);
        if (v->is_number()) return {as_number(*v, key)};
        if (!v->is_array() || v->empty()) fail(key, "expected a non-empty list of numbers");
        std::vector<double> out;
        for (const auto& e : *v) out.push_back(as_number(e, key));
        return out;
    }

    Point point(const std::string& key, int dim, std::optional<Point> def = std::nullopt) {
        const json* v = find(key);
        if (!v) return required(key, def);
        return as_point(*v, key, dim);
    }

    std::vector<Point> points(const std::string& key, int dim) {
        const json* v = find(key);
        if (!v) fail(key, "missing required key");
        if (!v->is_array() || v->empty()) fail(key, "expected a non-empty list of points");
        std::vector<Point> out;
        for (const auto& e : *v) out.push_back(as_point(e, key, dim));
        return out;
    }

    void finish() const {
        for (const auto& item : j_.items())
            if (!used_.count(item.key())) throw UsageError(where_ + ": unknown key \"" + item.key() + "\"");
    }

private:
    const json* find(const std::string& key) {
        used_.insert(key);
        auto it = j_.find(key);
        return it == j_.end() ? nullptr : &*it;
    }

    template <class T>
    T required(const std::string& key, const std::optional<T>& def) const {
        if (!def) fail(key, "missing required key");
        return *def;
    }

    double as_number(const json& v, const std::string& key) const {
        if (!v.is_number()) fail(key, "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) fail(key, "expected a finite number");
        return x;
    }

    Point as_point(const json& v, const std::string& key, int dim) const {
        if (!v.is_array() || static_cast<int>(v.size()) != dim)
            fail(key, "expected " + std::to_string(dim) + " coordinates");
        Point p{};
        for (int i = 0; i < dim; ++i) p[i] = as_number(v[i], key);
        return p;
    }

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
        throw UsageError(where_ + "." + key + ": " + msg);
    }

    const json& j_;
    std::string where_;
    std::set<std::string> used_;
};

json point_json(const Point& p, int dim) {
    json a = json::array();
    for (int i = 0; i < dim; ++i) a.push_back(p[i]);
    return a;
}

json list_json(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(x);
    return a;
}

QuadratureSpec read_quad(Reader& r, const std::string& key, const QuadratureSpec& def) {
    QuadratureSpec q = def;
    if (r.has(key)) {
        Reader sub(r.raw(key), key);
        q.rel_tol = sub.number("rel_tol", def.rel_tol);
        q.abs_tol = sub.number("abs_tol", def.abs_tol);
        sub.finish();
    }
    q.validate();
    return q;
}

json quad_json(const QuadratureSpec& q) { return json{{"rel_tol", q.rel_tol}, {"abs_tol", q.abs_tol}}; }

// ---- tables

enum class ColKind { Real, Complex, Text };

struct Column {
    std::string name;
    ColKind kind;
};

using Cell = std::variant<double, cplx, std::string>;

struct Table {
    std::vector<Column> columns;
    std::vector<std::vector<Cell>> rows;
    json summary = json::object();
};

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json jnum(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_csv(std::ostream& os, const json& meta, const Table& t) {
    os << "# meta: " << meta.dump() << '\n';
    bool first = true;
    auto sep = [&] {
        if (!first) os << ',';
        first = false;
    };
    for (const auto& c : t.columns) {
        if (c.kind == ColKind::Complex) {
            sep();
            os << c.name << "_re";
            sep();
            os << c.name << "_im";
        } else {
            sep();
            os << c.name;
        }
    }
    os << '\n';
    for (const auto& row : t.rows) {
        first = true;
        for (const auto& cell : row) {
            if (auto d = std::get_if<double>(&cell)) {
                sep();
                os << fmt(*d);
            } else if (auto z = std::get_if<cplx>(&cell)) {
                sep();
                os << fmt(z->real());
                sep();
                os << fmt(z->imag());
            } else {
                sep();
                os << std::get<std::string>(cell);
            }
        }
        os << '\n';
    }
    os << "# summary: " << t.summary.dump() << '\n';
}

void write_json(std::ostream& os, const json& meta, const Table& t) {
    json doc;
    doc["meta"] = meta;
    json cols = json::array();
    for (const auto& c : t.columns) {
        const char* kind = c.kind == ColKind::Complex ? "complex" : c.kind == ColKind::Real ? "real" : "text";
        cols.push_back(json{{"name", c.name}, {"type", kind}});
    }
    doc["columns"] = cols;
    json rows = json::array();
    for (const auto& row : t.rows) {
        json r = json::array();
        for (const auto& cell : row) {
            if (auto d = std::get_if<double>(&cell))
                r.push_back(jnum(*d));
            else if (auto z = std::get_if<cplx>(&cell))
                r.push_back(json{{"re", jnum(z->real())}, {"im", jnum(z->imag())}});
            else
                r.push_back(std::get<std::string>(cell));
        }
        rows.push_back(r);
    }
    doc["rows"] = rows;
    doc["summary"] = t.summary;
    os << doc.dump(2) << '\n';
}

struct Outcome {
    json config;
    json tolerances;
    Table table;
    int code = kOk;
    std::string message;
};

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
const cplx kNaNc{kNaN, kNaN};

// ---- green

struct GreenCfg {
    int dim;
    double s, k, eps;
    std::vector<double> r;
    bool decompose;
    QuadratureSpec quad;

    static GreenCfg read(Reader& in) {
        GreenCfg c;
        c.dim = in.integer("dim");
        c.s = in.number("s");
        c.k = in.number("k", 1.0);
        c.eps = in.number("eps", 0.0);
        c.r = in.numbers("r");
        c.decompose = in.boolean("decompose", false);
        c.quad = read_quad(in, "quad", default_green_spec());
        make_shift(make_problem(c.dim, c.s, c.k), c.eps);
        for (double r : c.r)
            if (!(r > 0.0)) throw DomainError("r must be positive");
        return c;
    }
    json to_json() const {
        return json{{"dim", dim}, {"s", s},           {"k", k},
                    {"eps", eps}, {"r", list_json(r)}, {"decompose", decompose},
                    {"quad", quad_json(quad)}};
    }
};

void execute(const GreenCfg& c, Outcome& o) {
    const Problem p = make_problem(c.dim, c.s, c.k);
    const SpectralShift shift = make_shift(p, c.eps);
    std::vector<GreenDecomposition> res(c.r.size());
    std::vector<char> flagged(c.r.size(), 0);
    parallel_for(c.r.size(), [&](std::size_t i) {
        try {
            res[i] = green_eval(p, shift, c.r[i], c.quad);
        } catch (const AccuracyError& e) {
            res[i].total = e.best_estimate;
            res[i].err_estimate = e.err_estimate;
            res[i].helm = res[i].riesz_sum = res[i].j_tail = kNaNc;
            flagged[i] = 1;
        }
    });
    Table& t = o.table;
    t.columns = {{"r", ColKind::Real}, {"total", ColKind::Complex}};
    if (c.decompose)
        for (const char* name : {"helm", "riesz", "j_tail"}) t.columns.push_back({name, ColKind::Complex});
    t.columns.push_back({"err_estimate", ColKind::Real});
    t.columns.push_back({"status", ColKind::Text});
    int bad = 0;
    for (std::size_t i = 0; i < c.r.size(); ++i) {
        std::vector<Cell> row{c.r[i], res[i].total};
        if (c.decompose) {
            row.push_back(res[i].helm);
            row.push_back(res[i].riesz_sum);
            row.push_back(res[i].j_tail);
        }
        row.push_back(res[i].err_estimate);
        row.push_back(std::string(flagged[i] ? "accuracy" : "ok"));
        bad += flagged[i];
        t.rows.push_back(std::move(row));
    }
    t.summary = json{{"rows", c.r.size()}, {"flagged", bad}};
    if (bad) {
        o.code = kAccuracy;
        o.message = std::to_string(bad) + " row(s) missed the quadrature tolerance";
    }
}

// ---- oracle-compare

struct OracleCfg {
    int dim;
    double s, k, eps;
    std::vector<double> r;
    QuadratureSpec quad, oracle_quad;

    static OracleCfg read(Reader& in) {
        OracleCfg c;
        c.dim = in.integer("dim");
        c.s = in.number("s");
        c.k = in.number("k", 1.0);
        c.eps = in.number("eps", 0.3);
        c.r = in.numbers("r");
        c.quad = read_quad(in, "quad", default_green_spec());
        c.oracle_quad = read_quad(in, "oracle_quad", default_oracle_spec());
        make_shift(make_problem(c.dim, c.s, c.k), c.eps);
        if (!(c.eps > 0.0)) throw DomainError("oracle-compare needs eps > 0");
        for (double r : c.r)
            if (!(r > 0.0)) throw DomainError("r must be positive");
        return c;
    }
    json to_json() const {
        return json{{"dim", dim},
                    {"s", s},
                    {"k", k},
                    {"eps", eps},
                    {"r", list_json(r)},
                    {"quad", quad_json(quad)},
                    {"oracle_quad", quad_json(oracle_quad)}};
    }
};

void execute(const OracleCfg& c, Outcome& o) {
    const Problem p = make_problem(c.dim, c.s, c.k);
    const SpectralShift shift = make_shift(p, c.eps);
    struct Res {
        cplx g, f;
        double ge = 0, fe = 0;
        bool bad = false;
    };
    std::vector<Res> res(c.r.size());
    parallel_for(c.r.size(), [&](std::size_t i) {
        Res& x = res[i];
        try {
            auto g = green_eval(p, shift, c.r[i], c.quad);
            x.g = g.total;
            x.ge = g.err_estimate;
        } catch (const AccuracyError& e) {
            x.g = e.best_estimate;
            x.ge = e.err_estimate;
            x.bad = true;
        }
        try {
            auto f = fourier_invert(p, shift, c.r[i], c.oracle_quad);
            x.f = f.value;
            x.fe = f.err_estimate;
        } catch (const AccuracyError& e) {
            x.f = e.best_estimate;
            x.fe = e.err_estimate;
            x.bad = true;
        }
    });
    Table& t = o.table;
    t.columns = {{"r", ColKind::Real},           {"green", ColKind::Complex},      {"oracle", ColKind::Complex},
                 {"rel_diff", ColKind::Real},    {"green_err", ColKind::Real},     {"oracle_err", ColKind::Real},
                 {"status", ColKind::Text}};
    double worst = 0.0;
    int bad = 0;
    for (std::size_t i = 0; i < c.r.size(); ++i) {
        const Res& x = res[i];
        const double rel = std::abs(x.g - x.f) / std::abs(x.g);
        worst = std::max(worst, rel);
        bad += x.bad;
        t.rows.push_back({c.r[i], x.g, x.f, rel, x.ge, x.fe, std::string(x.bad ? "accuracy" : "ok")});
    }
    t.summary = json{{"max_rel_diff", jnum(worst)}, {"flagged", bad}};
    if (bad) {
        o.code = kAccuracy;
        o.message = std::to_string(bad) + " row(s) missed the quadrature tolerance";
    }
}

// ---- asymptotics

struct AsymCfg {
    int dim;
    double s, k;
    std::string part, side;
    double r_min, r_max, rate;
    bool log_weight, control;
    int samples;
    double drift;
    QuadratureSpec quad;

    bool toward_zero() const { return side == "zero"; }

    static AsymCfg read(Reader& in) {
        AsymCfg c;
        c.dim = in.integer("dim");
        c.s = in.number("s");
        c.k = in.number("k", 1.0);
        const Problem p = make_problem(c.dim, c.s, c.k);
        c.part = in.text("part", "j_tail");
        parse_part(c.part);
        c.side = in.text("side", "infinity");
        if (c.side != "infinity" && c.side != "zero") throw UsageError("side must be \"infinity\" or \"zero\"");
        c.r_min = in.number("r_min", c.toward_zero() ? 1e-3 : 10.0);
        c.r_max = in.number("r_max", c.toward_zero() ? 0.5 : 1e4);
        const ClaimedRate th = theorem_rate(p, c.toward_zero());
        c.rate = in.number("rate", th.rate);
        c.log_weight = in.boolean("log_weight", in.has("rate") ? false : th.log_weight);
        if (c.log_weight && !c.toward_zero()) throw UsageError("log_weight applies only to side \"zero\"");
        c.control = in.boolean("control", true);
        c.samples = in.integer("samples", 25);
        c.drift = in.number("drift", 100.0);
        c.quad = read_quad(in, "quad", default_green_spec());
        if (c.samples < 3) throw DomainError("samples must be at least 3");
        if (!(c.drift > 1.0)) throw DomainError("drift must exceed 1");
        return c;
    }
    json to_json() const {
        return json{{"dim", dim},         {"s", s},           {"k", k},
                    {"part", part},       {"side", side},     {"r_min", r_min},
                    {"r_max", r_max},     {"rate", rate},     {"log_weight", log_weight},
                    {"control", control}, {"samples", samples}, {"drift", drift},
                    {"quad", quad_json(quad)}};
    }
};

RateFit rate_fit(const AsymCfg& c, double rate, bool log_weight) {
    const Problem p = make_problem(c.dim, c.s, c.k);
    RateCheckOptions opt;
    opt.samples = c.samples;
    opt.drift = c.drift;
    opt.quad = c.quad;
    const FieldPart part = parse_part(c.part);
    if (c.toward_zero()) return singularity_rate_check(p, part, c.r_min, c.r_max, rate, log_weight, opt);
    return decay_rate_check(p, part, c.r_min, c.r_max, rate, opt);
}

json fit_json(const RateFit& f) {
    return json{{"claimed_rate", f.claimed_rate},   {"log_weight", f.log_weight},
                {"slope", jnum(f.slope)},           {"drift", f.drift},
                {"envelope_ratio", jnum(f.envelope_ratio)}, {"envelope_bounded", f.envelope_bounded}};
}

void execute(const AsymCfg& c, Outcome& o) {
    const RateFit fit = rate_fit(c, c.rate, c.log_weight);
    Table& t = o.table;
    t.columns = {{"r", ColKind::Real}, {"value", ColKind::Real}, {"product", ColKind::Real}};
    for (std::size_t i = 0; i < fit.radii.size(); ++i) {
        const double r = fit.radii[i];
        const double w = fit.log_weight ? 1.0 / -std::log(r) : std::pow(r, fit.claimed_rate);
        t.rows.push_back({r, fit.values[i], fit.values[i] * w});
    }
    t.summary = fit_json(fit);
    if (c.control) {
        // Toward infinity the control claims faster decay; toward zero a milder singularity.
        const double ctl = c.toward_zero() ? (c.log_weight ? -1.0 : c.rate - 1.0) : c.rate + 1.0;
        t.summary["control"] = fit_json(rate_fit(c, ctl, false));
    }
}

// ---- lap

struct LapCfg {
    int dim;
    double s, k, r;
    std::vector<double> eps;
    QuadratureSpec quad;

    static LapCfg read(Reader& in) {
        LapCfg c;
        c.dim = in.integer("dim");
        c.s = in.number("s");
        c.k = in.number("k", 1.0);
        make_problem(c.dim, c.s, c.k);
        c.r = in.number("r", 1.0);
        c.eps = in.numbers("eps", std::vector<double>{1e-1, 1e-2, 1e-3});
        c.quad = read_quad(in, "quad", default_green_spec());
        if (!(c.r > 0.0)) throw DomainError("r must be positive");
        if (c.eps.size() < 2) throw DomainError("lap needs at least two eps values");
        for (double e : c.eps)
            if (!(e > 0.0)) throw DomainError("eps values must be positive");
        return c;
    }
    json to_json() const {
        return json{{"dim", dim}, {"s", s}, {"k", k}, {"r", r}, {"eps", list_json(eps)}, {"quad", quad_json(quad)}};
    }
};

void execute(const LapCfg& c, Outcome& o) {
    const LapFit fit = lap_slope(make_problem(c.dim, c.s, c.k), c.r, c.eps, c.quad);
    Table& t = o.table;
    t.columns = {{"eps", ColKind::Real}, {"diff", ColKind::Real}, {"noise", ColKind::Real}};
    for (std::size_t i = 0; i < fit.eps.size(); ++i) t.rows.push_back({fit.eps[i], fit.diffs[i], fit.noise[i]});
    t.summary = json{{"slope", jnum(fit.slope)}};
}

// ---- radiation

struct RadiationCfg {
    int dim;
    double s, k;
    std::string field;
    double R0, R_max, delta;
    int angular, polar, radial_order, radial_split;
    QuadratureSpec quad;

    static RadiationCfg read(Reader& in) {
        RadiationCfg c;
        c.dim = in.integer("dim");
        c.field = in.text("field", "green");
        if (c.field != "green" && c.field != "outgoing" && c.field != "incoming")
            throw UsageError("field must be \"green\", \"outgoing\" or \"incoming\"");
        // s only matters for the Green field; it is still validated and echoed
        c.s = in.number("s", 0.5);
        c.k = in.number("k", 1.0);
        make_problem(c.dim, c.s, c.k);
        const RadiationOptions def;
        c.R0 = in.number("R0", def.R0);
        c.R_max = in.number("R_max", def.R_max);
        c.delta = in.number("delta", def.delta);
        c.angular = in.integer("angular", def.angular);
        c.polar = in.integer("polar", def.polar);
        c.radial_order = in.integer("radial_order", def.radial_order);
        c.radial_split = in.integer("radial_split", def.radial_split);
        c.quad = read_quad(in, "quad", default_derivative_spec());
        if (!(c.R0 > 0.0) || !(c.R_max >= 4.0 * c.R0)) throw DomainError("need R0 > 0 and R_max >= 4 R0");
        if (!(c.delta > 0.5 && c.delta < 1.0)) throw DomainError("delta must lie in (1/2, 1)");
        if (c.angular < 4 || c.polar < 2 || c.radial_order < 2 || c.radial_split < 1)
            throw DomainError("quadrature orders too small");
        return c;
    }
    json to_json() const {
        return json{{"dim", dim},
                    {"field", field},
                    {"s", s},
                    {"k", k},
                    {"R0", R0},
                    {"R_max", R_max},
                    {"delta", delta},
                    {"angular", angular},
                    {"polar", polar},
                    {"radial_order", radial_order},
                    {"radial_split", radial_split},
                    {"quad", quad_json(quad)}};
    }
};

// Free-space outgoing wave r -> (u, du/dr); `incoming` conjugates it.
std::pair<cplx, cplx> helmholtz_wave(int dim, double k, double r, bool incoming) {
    cplx u, du;
    if (dim == 1) {
        u = std::exp(kI * k * r);
        du = kI * k * u;
    } else if (dim == 2) {
        u = hankel1_0(cplx(k * r, 0.0));
        du = -k * hankel1_1(cplx(k * r, 0.0));
    } else {
        u = std::exp(kI * k * r) / (4.0 * kPi * r);
        du = (kI * k - 1.0 / r) * u;
    }
    if (incoming) return {std::conj(u), std::conj(du)};
    return {u, du};
}

void execute(const RadiationCfg& c, Outcome& o) {
    RadiationOptions opt;
    opt.dim = c.dim;
    opt.k = c.k;
    opt.R0 = c.R0;
    opt.R_max = c.R_max;
    opt.delta = c.delta;
    opt.angular = c.angular;
    opt.polar = c.polar;
    opt.radial_order = c.radial_order;
    opt.radial_split = c.radial_split;
    PointField field;
    if (c.field == "green") {
        const Problem p = make_problem(c.dim, c.s, c.k);
        const SpectralShift sh = make_shift(p, 0.0);
        const QuadratureSpec q = c.quad;
        field = radial_field(c.dim, [p, sh, q](double r) {
            return std::pair<cplx, cplx>(green_eval(p, sh, r, q).total, green_radial_derivative(p, sh, r, q).total);
        });
    } else {
        const bool incoming = c.field == "incoming";
        const int dim = c.dim;
        const double k = c.k;
        field = radial_field(dim, [=](double r) { return helmholtz_wave(dim, k, r, incoming); });
    }
    const RadiationReport rep = radiation_classify(field, opt);
    Table& t = o.table;
    t.columns = {{"r", ColKind::Real}, {"src_residual", ColKind::Real}, {"gsrc_partial", ColKind::Real}};
    for (std::size_t i = 0; i < rep.src_profile.size(); ++i) {
        const double g = i < rep.gsrc_partial.size() ? rep.gsrc_partial[i].second : kNaN;
        t.rows.push_back({rep.src_profile[i].first, rep.src_profile[i].second, g});
    }
    t.summary = json{{"delta", rep.delta},
                     {"verdict_src", rep.verdict_src},
                     {"verdict_gsrc", rep.verdict_gsrc},
                     {"agree", rep.verdict_src == rep.verdict_gsrc}};
}

// ---- scatter and resonance-scan share the potential description

struct PotentialCfg {
    Point lo{}, hi{};
    int cells = 0;
    json q;  // number or per-cell array, kept verbatim for the echo

    void read(Reader& in, int dim) {
        lo = in.point("lo", dim, Point{-0.5, -0.5, -0.5});
        hi = in.point("hi", dim, Point{0.5, 0.5, 0.5});
        cells = in.integer("cells", 16);
        q = in.raw("q");
        if (q.is_number()) {
            if (!std::isfinite(q.get<double>())) throw UsageError("q must be finite");
        } else if (q.is_array()) {
            for (const auto& v : q)
                if (!v.is_number()) throw UsageError("q array must hold numbers");
        } else {
            throw UsageError("q must be a number or a per-cell array");
        }
        grid(dim);  // validates
    }

    PotentialGrid grid(int dim) const {
        if (q.is_number()) {
            const double v = q.get<double>();
            return make_potential_grid(dim, lo, hi, cells, [v](const Point&) { return v; });
        }
        return make_potential_grid(dim, lo, hi, cells, q.get<std::vector<double>>());
    }

    void write(json& j, int dim) const {
        j["lo"] = point_json(lo, dim);
        j["hi"] = point_json(hi, dim);
        j["cells"] = cells;
        j["q"] = q;
    }
};

struct ScatterCfg {
    int dim;
    double s, k;
    PotentialCfg pot;
    Point direction{};
    std::vector<Point> points;
    bool born;
    int local_panels, near_cells;
    QuadratureSpec quad;

    static ScatterCfg read(Reader& in) {
        ScatterCfg c;
        c.dim = in.integer("dim");
        c.s = in.number("s");
        c.k = in.number("k", 1.0);
        make_problem(c.dim, c.s, c.k);
        c.pot.read(in, c.dim);
        Point d{};
        d[0] = 1.0;
        c.direction = in.point("direction", c.dim, d);
        make_plane_wave(c.dim, c.direction);
        c.points = in.points("points", c.dim);
        c.born = in.boolean("born", false);
        c.local_panels = in.integer("local_panels", 2);
        c.near_cells = in.integer("near_cells", 2);
        c.quad = read_quad(in, "quad", default_green_spec());
        if (c.local_panels < 1 || c.near_cells < 0) throw DomainError("local_panels >= 1 and near_cells >= 0");
        return c;
    }
    json to_json() const {
        json j{{"dim", dim}, {"s", s}, {"k", k}};
        pot.write(j, dim);
        j["direction"] = point_json(direction, dim);
        json pts = json::array();
        for (const auto& p : points) pts.push_back(point_json(p, dim));
        j["points"] = pts;
        j["born"] = born;
        j["local_panels"] = local_panels;
        j["near_cells"] = near_cells;
        j["quad"] = quad_json(quad);
        return j;
    }
    ScatterOptions options() const {
        ScatterOptions opt;
        opt.quad = quad;
        opt.local_panels = local_panels;
        opt.near_cells = near_cells;
        return opt;
    }
};

const char* const kAxis[] = {"x", "y", "z"};

void execute(const ScatterCfg& c, Outcome& o) {
    const Problem p = make_problem(c.dim, c.s, c.k);
    const PotentialGrid grid = c.pot.grid(c.dim);
    const IncidentField inc = make_plane_wave(c.dim, c.direction);
    const NystromSystem sys = build_nystrom(p, grid, c.options());
    const ScatterSolution sol = solve_ls(sys, inc);
    const std::size_t n = c.points.size();
    std::vector<cplx> scat(n), born(n);
    parallel_for(n, [&](std::size_t i) {
        scat[i] = eval_scattered(sol, c.points[i]);
        if (c.born) born[i] = born_approx(sys, inc, c.points[i]);
    });
    Table& t = o.table;
    for (int a = 0; a < c.dim; ++a) t.columns.push_back({kAxis[a], ColKind::Real});
    for (const char* name : {"u_inc", "u_scat", "u_total"}) t.columns.push_back({name, ColKind::Complex});
    if (c.born) t.columns.push_back({"born_scat", ColKind::Complex});
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<Cell> row;
        for (int a = 0; a < c.dim; ++a) row.push_back(c.points[i][a]);
        const cplx ui = inc.value(c.points[i], c.k);
        row.push_back(ui);
        row.push_back(scat[i]);
        row.push_back(ui + scat[i]);
        if (c.born) row.push_back(born[i]);
        t.rows.push_back(std::move(row));
    }
    t.summary = json{{"nodes", grid.size()}, {"residual", jnum(sol.residual)}, {"rcond", jnum(sol.rcond)}};
}

struct ResonanceCfg {
    int dim;
    double s;
    PotentialCfg pot;
    std::vector<double> k_grid;
    int local_panels, near_cells;
    QuadratureSpec quad;

    static ResonanceCfg read(Reader& in) {
        ResonanceCfg c;
        c.dim = in.integer("dim");
        c.s = in.number("s");
        make_problem(c.dim, c.s, 1.0);
        c.pot.read(in, c.dim);
        if (in.has("k_grid")) {
            c.k_grid = in.numbers("k_grid");
        } else {
            // uniform grid from k_min, k_max, k_count; the echo stores the expanded list
            const double a = in.number("k_min", 0.5), b = in.number("k_max", 2.0);
            const int m = in.integer("k_count", 20);
            if (m < 1 || !(b >= a)) throw DomainError("need k_count >= 1 and k_max >= k_min");
            for (int i = 0; i < m; ++i) c.k_grid.push_back(m == 1 ? a : a + (b - a) * i / (m - 1));
        }
        for (double k : c.k_grid)
            if (!(k > 0.0)) throw DomainError("k values must be positive");
        c.local_panels = in.integer("local_panels", 2);
        c.near_cells = in.integer("near_cells", 2);
        c.quad = read_quad(in, "quad", default_green_spec());
        if (c.local_panels < 1 || c.near_cells < 0) throw DomainError("local_panels >= 1 and near_cells >= 0");
        return c;
    }
    json to_json() const {
        json j{{"dim", dim}, {"s", s}};
        pot.write(j, dim);
        j["k_grid"] = list_json(k_grid);
        j["local_panels"] = local_panels;
        j["near_cells"] = near_cells;
        j["quad"] = quad_json(quad);
        return j;
    }
};

void execute(const ResonanceCfg& c, Outcome& o) {
    ScatterOptions opt;
    opt.quad = c.quad;
    opt.local_panels = c.local_panels;
    opt.near_cells = c.near_cells;
    const PotentialGrid grid = c.pot.grid(c.dim);
    const auto scan = resonance_scan(make_problem(c.dim, c.s, c.k_grid.front()), grid, c.k_grid, opt);
    Table& t = o.table;
    t.columns = {{"k", ColKind::Real}, {"rcond", ColKind::Real}, {"indicator", ColKind::Real}};
    double lo = std::numeric_limits<double>::infinity(), lo_rc = lo, arg = kNaN;
    for (const auto& smp : scan) {
        t.rows.push_back({smp.k, smp.rcond, smp.sigma_min});
        if (smp.sigma_min < lo) {
            lo = smp.sigma_min;
            arg = smp.k;
        }
        lo_rc = std::min(lo_rc, smp.rcond);
    }
    t.summary = json{{"min_indicator", jnum(lo)}, {"argmin_k", jnum(arg)}, {"min_rcond", jnum(lo_rc)},
                     {"coupling", jnum(std::pow(c.k_grid.back(), 2.0 * c.s) * grid.q_sup)}};
}

// ---- command table

enum class Kind { Int, Num, NumList, Text, Bool, Flag, Vec, Points };

struct Param {
    const char* flag;
    const char* key;  // dotted keys address nested objects
    Kind kind;
    const char* help;
};

const std::vector<Param> kProblem = {
    {"--dim", "dim", Kind::Int, "spatial dimension 1, 2 or 3"},
    {"--s", "s", Kind::Num, "fractional order in (0,1)"},
    {"--k", "k", Kind::Num, "wavenumber k > 0"},
};

const std::vector<Param> kPotential = {
    {"--lo", "lo", Kind::Vec, "lower box corner, comma separated"},
    {"--hi", "hi", Kind::Vec, "upper box corner, comma separated"},
    {"--cells", "cells", Kind::Int, "cells per axis"},
    {"--q", "q", Kind::Num, "constant potential value"},
    {"--local-panels", "local_panels", Kind::Int, "panels per face in local cell integrals"},
    {"--near-cells", "near_cells", Kind::Int, "max-norm radius of locally corrected cells"},
};

struct CommandDef {
    const char* name;
    const char* help;
    std::vector<Param> params;
};

std::vector<CommandDef> command_defs() {
    auto with = [](std::vector<Param> a, const std::vector<Param>& b) {
        a.insert(a.end(), b.begin(), b.end());
        return a;
    };
    return {
        {"green", "evaluate the outgoing fundamental solution at radii",
         with(kProblem, {{"--eps", "eps", Kind::Num, "absorption eps >= 0"},
                         {"--r", "r", Kind::NumList, "radii, comma separated"},
                         {"--decompose", "decompose", Kind::Flag, "also emit helm, riesz and j_tail"}})},
        {"oracle-compare", "compare against direct Fourier inversion",
         with(kProblem, {{"--eps", "eps", Kind::Num, "absorption eps > 0"},
                         {"--r", "r", Kind::NumList, "radii, comma separated"},
                         {"--oracle-rtol", "oracle_quad.rel_tol", Kind::Num, "oracle relative tolerance"},
                         {"--oracle-atol", "oracle_quad.abs_tol", Kind::Num, "oracle absolute tolerance"}})},
        {"asymptotics", "check a decay or singularity envelope of a Green part",
         with(kProblem, {{"--part", "part", Kind::Text, "j_tail or nonhelm_total"},
                         {"--side", "side", Kind::Text, "infinity or zero"},
                         {"--r-min", "r_min", Kind::Num, "window start"},
                         {"--r-max", "r_max", Kind::Num, "window end"},
                         {"--rate", "rate", Kind::Num, "claimed exponent (default: proven bound)"},
                         {"--log-weight", "log_weight", Kind::Bool, "use 1/(-ln r) instead of a power"},
                         {"--control", "control", Kind::Bool, "also run the inflated-rate control"},
                         {"--samples", "samples", Kind::Int, "log-spaced sample count"},
                         {"--drift", "drift", Kind::Num, "allowed growth factor"}})},
        {"lap", "limiting absorption slope of |G_eps - G_0| in eps",
         with(kProblem, {{"--r", "r", Kind::Num, "radius"},
                         {"--eps", "eps", Kind::NumList, "eps values, comma separated"}})},
        {"radiation", "classify a radial field by SRC and GSRC",
         with(kProblem, {{"--field", "field", Kind::Text, "green, outgoing or incoming"},
                         {"--R0", "R0", Kind::Num, "first radius"},
                         {"--R-max", "R_max", Kind::Num, "last radius (doublings of R0)"},
                         {"--delta", "delta", Kind::Num, "GSRC weight exponent in (1/2,1)"},
                         {"--angular", "angular", Kind::Int, "azimuthal points"},
                         {"--polar", "polar", Kind::Int, "polar points (3D)"},
                         {"--radial-order", "radial_order", Kind::Int, "Gauss points per radial panel"},
                         {"--radial-split", "radial_split", Kind::Int, "radial panels per doubling"}})},
        {"scatter", "solve the Lippmann-Schwinger equation and sample the field",
         with(with(kProblem, kPotential),
              {{"--direction", "direction", Kind::Vec, "incident direction"},
               {"--points", "points", Kind::Points, "observation points x,y;x,y"},
               {"--born", "born", Kind::Flag, "also emit the first Born approximation"}})},
        {"resonance-scan", "invertibility indicator of I - k^{2s} T_k over k",
         with(with({kProblem[0], kProblem[1]}, kPotential),
              {{"--k-grid", "k_grid", Kind::NumList, "k values, comma separated"},
               {"--k-min", "k_min", Kind::Num, "uniform grid start"},
               {"--k-max", "k_max", Kind::Num, "uniform grid end"},
               {"--k-count", "k_count", Kind::Int, "uniform grid size"}})},
    };
}

double parse_number(const std::string& s, const std::string& flag) {
    const char* b = s.c_str();
    char* e = nullptr;
    errno = 0;
    const double v = std::strtod(b, &e);
    while (e && *e == ' ') ++e;
    if (e == b || *e != '\0' || errno == ERANGE || !std::isfinite(v))
        throw UsageError(flag + ": not a finite number: \"" + s + "\"");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (out.empty()) out.push_back("");
    return out;
}

json convert(const Param& p, const std::string& v) {
    const std::string flag = p.flag;
    switch (p.kind) {
        case Kind::Int: {
            const double x = parse_number(v, flag);
            if (x != std::floor(x) || std::abs(x) > 1e9) throw UsageError(flag + ": expected an integer");
            return static_cast<int>(x);
        }
        case Kind::Num:
            return parse_number(v, flag);
        case Kind::NumList:
        case Kind::Vec: {
            json a = json::array();
            for (const auto& part : split(v, ',')) a.push_back(parse_number(part, flag));
            return a;
        }
        case Kind::Points: {
            json a = json::array();
            for (const auto& pt : split(v, ';')) {
                json c = json::array();
                for (const auto& part : split(pt, ',')) c.push_back(parse_number(part, flag));
                a.push_back(c);
            }
            return a;
        }
        case Kind::Bool:
            if (v == "true" || v == "1" || v == "on") return true;
            if (v == "false" || v == "0" || v == "off") return false;
            throw UsageError(flag + ": expected true or false");
        case Kind::Text:
            return v;
        case Kind::Flag:
            return true;
    }
    return nullptr;
}

void set_dotted(json& j, const std::string& key, json value) {
    const auto dot = key.find('.');
    if (dot == std::string::npos) {
        j[key] = std::move(value);
        return;
    }
    json& sub = j[key.substr(0, dot)];
    if (!sub.is_object()) sub = json::object();
    set_dotted(sub, key.substr(dot + 1), std::move(value));
}

json load_config(const std::string& path, const std::string& command) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file " + path);
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const std::string tag = "# meta: ";
    json doc;
    try {
        if (text.rfind(tag, 0) == 0)
            doc = json::parse(text.substr(tag.size(), text.find('\n') - tag.size()));
        else
            doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw UsageError(path + ": " + e.what());
    }
    // a whole JSON output document, or just its metadata record
    if (doc.is_object() && doc.contains("meta") && doc.contains("rows")) doc = doc["meta"];
    if (doc.is_object() && doc.contains("command") && doc.contains("config")) {
        if (doc["command"] != command)
            throw UsageError(path + ": metadata is for command " + doc["command"].dump() + ", not \"" + command + "\"");
        doc = doc["config"];
    }
    if (!doc.is_object()) throw UsageError(path + ": config must be a JSON object");
    return doc;
}

template <class Cfg>
Outcome evaluate(const json& merged) {
    Reader in(merged, "config");
    const Cfg cfg = Cfg::read(in);
    in.finish();
    Outcome o;
    o.config = cfg.to_json();
    o.tolerances = json::object();
    for (const char* key : {"quad", "oracle_quad"})
        if (o.config.contains(key)) o.tolerances[key] = o.config[key];
    try {
        execute(cfg, o);
    } catch (const AccuracyError& e) {
        o.table = Table{};
        o.table.summary = json{{"status", "accuracy_error"},
                               {"message", e.what()},
                               {"best_estimate", json{{"re", jnum(e.best_estimate.real())}, {"im", jnum(e.best_estimate.imag())}}},
                               {"err_estimate", jnum(e.err_estimate)}};
        o.code = kAccuracy;
        o.message = e.what();
    } catch (const NearResonanceError& e) {
        o.table = Table{};
        o.table.summary = json{{"status", "near_resonance"}, {"indicator", jnum(e.indicator)}, {"message", e.what()}};
        o.code = kNearResonance;
        o.message = std::string(e.what()) + " (indicator " + fmt(e.indicator) + ")";
    }
    return o;
}

Outcome dispatch(const std::string& name, const json& merged) {
    if (name == "green") return evaluate<GreenCfg>(merged);
    if (name == "oracle-compare") return evaluate<OracleCfg>(merged);
    if (name == "asymptotics") return evaluate<AsymCfg>(merged);
    if (name == "lap") return evaluate<LapCfg>(merged);
    if (name == "radiation") return evaluate<RadiationCfg>(merged);
    if (name == "scatter") return evaluate<ScatterCfg>(merged);
    if (name == "resonance-scan") return evaluate<ResonanceCfg>(merged);
    throw UsageError("unknown command " + name);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Fractional Helmholtz fundamental solutions, diagnostics and scattering", "frachelm"};
    app.set_version_flag("--version", std::string(version_string()));
    app.require_subcommand(1);

    const auto defs = command_defs();
    struct Slots {
        std::map<std::string, std::string> text;
        std::map<std::string, bool> flags;
        std::map<std::string, CLI::Option*> opts;
        std::string config, format = "csv", output, rtol, atol;
    };
    std::map<std::string, Slots> slots;
    std::map<std::string, CLI::App*> subs;
    for (const auto& def : defs) {
        Slots& sl = slots[def.name];
        CLI::App* sub = app.add_subcommand(def.name, def.help);
        subs[def.name] = sub;
        sub->add_option("--config", sl.config, "JSON config, or a previous run's output/metadata");
        sub->add_option("--format", sl.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--output", sl.output, "write the table here instead of stdout");
        sl.opts["quad.rel_tol"] = sub->add_option("--quad-rtol", sl.rtol, "quadrature relative tolerance");
        sl.opts["quad.abs_tol"] = sub->add_option("--quad-atol", sl.atol, "quadrature absolute tolerance");
        for (const auto& p : def.params) {
            if (p.kind == Kind::Flag)
                sl.opts[p.key] = sub->add_flag(p.flag, sl.flags[p.key], p.help);
            else
                sl.opts[p.key] = sub->add_option(p.flag, sl.text[p.key], p.help);
        }
    }

    // CLI11 wants argv order reversed
    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? kOk : kUsage;
    }

    const CLI::App* chosen = app.get_subcommands().front();
    const std::string name = chosen->get_name();
    Slots& sl = slots[name];
    const CommandDef* def = nullptr;
    for (const auto& d : defs)
        if (name == d.name) def = &d;

    try {
        json merged = sl.config.empty() ? json::object() : load_config(sl.config, name);
        for (const auto& p : def->params) {
            if (sl.opts[p.key]->count() == 0) continue;
            set_dotted(merged, p.key, p.kind == Kind::Flag ? json(true) : convert(p, sl.text[p.key]));
        }
        if (sl.opts["quad.rel_tol"]->count())
            set_dotted(merged, "quad.rel_tol", convert({"--quad-rtol", "", Kind::Num, ""}, sl.rtol));
        if (sl.opts["quad.abs_tol"]->count())
            set_dotted(merged, "quad.abs_tol", convert({"--quad-atol", "", Kind::Num, ""}, sl.atol));

        Outcome o = dispatch(name, merged);
        json meta{{"command", name}, {"version", version_string()}, {"config", o.config}, {"tolerances", o.tolerances}};

        std::ostringstream buf;
        if (sl.format == "json")
            write_json(buf, meta, o.table);
        else
            write_csv(buf, meta, o.table);
        if (sl.output.empty()) {
            out << buf.str();
        } else {
            std::ofstream f(sl.output, std::ios::binary);
            if (!f) throw UsageError("cannot write " + sl.output);
            f << buf.str();
        }
        if (o.code != kOk) err << "error: " << o.message << '\n';
        return o.code;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const AccuracyError& e) {
        err << "error: " << e.what() << '\n';
        return kAccuracy;
    } catch (const NearResonanceError& e) {
        err << "error: " << e.what() << " (indicator " << fmt(e.indicator) << ")\n";
        return kNearResonance;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace frachelm::cli
