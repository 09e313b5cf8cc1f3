#include "pmstat/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <type_traits>

#include "CLI11.hpp"
#include "pmstat/harness.hpp"

namespace pmstat {

namespace {

using nlohmann::json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Options {
    std::uint64_t seed = 1;
    std::size_t size = 100;
    std::size_t N = 10000;
    std::size_t samples = 8;
    double tol = 0.01;
    double dl_tol = 1e-6;
    std::string f, g, tnorm = "min", space, matrix = "cesaro", ideal = "fin", seq, set, limit, out, csv, config;
};

struct Outcome {
    std::string status;  // pass, fail or ok
    json result;
    std::string summary;
    std::string document;  // preformatted report, when the command builds its own
};

struct Flag {
    std::string key;
    CLI::Option* opt;
    std::function<void(const json&)> assign;
    std::function<json()> read;
};

struct Command {
    CLI::App* app = nullptr;
    std::unique_ptr<Options> opts = std::make_unique<Options>();
    std::vector<Flag> flags;
    std::function<Outcome(const Options&)> run;
};

template <class T>
void num_flag(Command& c, const std::string& key, T& var, const std::string& desc, bool positive = true) {
    CLI::Option* o = c.app->add_option("--" + key, var, desc)->capture_default_str();
    if (positive) o->check(CLI::PositiveNumber);
    auto assign = [&var, key, positive](const json& v) {
        if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned())) {
                throw UsageError("config key " + key + " must be a non-negative integer");
            }
        } else if (!v.is_number()) {
            throw UsageError("config key " + key + " must be a number");
        }
        const T x = v.get<T>();
        if (positive && !(x > 0)) throw UsageError("config key " + key + " must be positive");
        var = x;
    };
    c.flags.push_back({key, o, assign, [&var] { return json(var); }});
}

void str_flag(Command& c, const std::string& key, std::string& var, const std::string& desc) {
    CLI::Option* o = c.app->add_option("--" + key, var, desc);
    auto assign = [&var, key](const json& v) {
        if (!v.is_string()) throw UsageError("config key " + key + " must be a string");
        var = v.get<std::string>();
    };
    c.flags.push_back({key, o, assign, [&var] { return json(var); }});
}

std::vector<std::string> split(const std::string& s, char sep, std::size_t max_parts = 0) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        if (max_parts && out.size() + 1 == max_parts) {
            out.push_back(s.substr(start));
            break;
        }
        const std::size_t pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

std::size_t to_count(const std::string& s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) throw UsageError("not a count: " + s);
    return std::stoull(s);
}

double to_real(const std::string& s) {
    if (s == "inf") return std::numeric_limits<double>::infinity();
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw UsageError("not a number: " + s);
    }
    if (used != s.size()) throw UsageError("not a number: " + s);
    return v;
}

json read_json(const std::string& text_or_path) {
    std::string text = text_or_path;
    if (text.empty()) throw UsageError("empty JSON argument");
    if (text.front() != '{' && text.front() != '[') {
        std::ifstream in(text_or_path);
        if (!in) throw UsageError("cannot read " + text_or_path);
        std::stringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw UsageError(std::string("invalid JSON: ") + e.what());
    }
}

// ---------------------------------------------------------------- parsers

StepDistFn step_from_json(const json& j) {
    if (!j.is_array()) throw UsageError("a distribution function is an array of [location, value] pairs");
    std::vector<Jump> js;
    for (const auto& p : j) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
            throw UsageError("a jump is a [location, value] pair of numbers");
        }
        js.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    try {
        return StepDistFn(std::move(js));
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

json step_to_json(const StepDistFn& f) {
    json out = json::array();
    for (const Jump& j : f.jumps()) out.push_back({j.location, j.value});
    return out;
}

StepDistFn parse_step(const std::string& s) {
    if (s.rfind("eps:", 0) == 0) {
        const double b = to_real(s.substr(4));
        if (!(b >= 0.0)) throw UsageError("unit step location must be >= 0");
        return unit_step(b);
    }
    if (!s.empty() && s.front() == '[') return step_from_json(read_json(s));
    throw UsageError("distribution function must be eps:<b> or a JSON jump list: " + s);
}

FinitePMSpace load_space(const std::string& arg) {
    if (arg.empty()) throw UsageError("--space is required");
    const json j = read_json(arg);
    if (!j.is_object()) throw UsageError("space must be a JSON object");
    for (const auto& [k, v] : j.items()) {
        if (k != "points" && k != "tnorm" && k != "F" && k != "metric" && k != "equilateral") {
            throw UsageError("unknown space key: " + k);
        }
    }
    if (!j.contains("points") || !j["points"].is_array()) throw UsageError("space needs a points array");
    std::vector<std::string> points;
    for (const auto& p : j["points"]) {
        if (!p.is_string()) throw UsageError("point names must be strings");
        points.push_back(p.get<std::string>());
    }
    const int forms = j.contains("F") + j.contains("metric") + j.contains("equilateral");
    if (forms != 1) throw UsageError("space needs exactly one of F, metric, equilateral");
    try {
        if (j.contains("metric")) {
            return build_metric_induced(points, j["metric"].get<std::vector<std::vector<double>>>());
        }
        if (j.contains("equilateral")) return build_equilateral(points, step_from_json(j["equilateral"]));
        const json& F = j["F"];
        if (!F.is_array() || F.size() != points.size()) throw UsageError("F must be an n x n array of jump lists");
        std::vector<StepDistFn> table;
        for (const auto& row : F) {
            if (!row.is_array() || row.size() != points.size()) throw UsageError("F must be an n x n array of jump lists");
            for (const auto& cell : row) table.push_back(step_from_json(cell));
        }
        const std::string tag = j.value("tnorm", "maximal");
        return FinitePMSpace(points, std::move(table), TriangleFn::from_tag(tag));
    } catch (const SpaceError&) {
        throw;
    } catch (const json::exception& e) {
        throw UsageError(std::string("malformed space: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

FinitePMSpace load_valid_space(const std::string& arg) {
    try {
        FinitePMSpace S = load_space(arg);
        const auto rep = validate_axioms(S);
        if (!rep.passed) throw UsageError("space violates " + rep.violation->axiom + ": " + rep.violation->message);
        return S;
    } catch (const SpaceError& e) {
        throw UsageError("space violates " + e.violation().axiom + ": " + e.what());
    }
}

SummMatrix parse_matrix(const std::string& s) {
    if (s == "cesaro") return SummMatrix::cesaro();
    if (s == "identity") return SummMatrix::identity();
    if (s == "sqweight") return SummMatrix::squares_weighted();
    if (s == "column1") return SummMatrix::constant_column();
    if (s.rfind("block:", 0) == 0) {
        try {
            return SummMatrix::block(to_real(s.substr(6)));
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    if (s.rfind("file:", 0) == 0) {
        const json j = read_json(s.substr(5));
        if (!j.is_object() || !j.contains("rows") || !j["rows"].is_array()) {
            throw UsageError("matrix file needs a rows array");
        }
        std::vector<std::vector<RowSegment>> rows;
        try {
            for (const auto& row : j["rows"]) {
                std::vector<RowSegment> segs;
                for (const auto& seg : row) {
                    segs.push_back({seg.at(0).get<std::size_t>(), seg.at(1).get<std::size_t>(), seg.at(2).get<double>()});
                }
                rows.push_back(std::move(segs));
            }
        } catch (const json::exception& e) {
            throw UsageError(std::string("matrix rows are lists of [first, last, weight]: ") + e.what());
        }
        return SummMatrix::from_rows(j.value("name", s), std::move(rows));
    }
    throw UsageError("unknown matrix: " + s);
}

Ideal parse_ideal(const std::string& s) {
    if (s == "fin") return Ideal::fin();
    if (s.rfind("density:", 0) == 0) return Ideal::density_zero(parse_matrix(s.substr(8)));
    throw UsageError("unknown ideal: " + s);
}

std::vector<std::size_t> count_list(const std::string& s) {
    std::vector<std::size_t> out;
    for (const auto& p : split(s, ',')) out.push_back(to_count(p));
    return out;
}

IndexSet parse_set(const std::string& s) {
    if (s.empty()) throw UsageError("index set is required");
    if (s.front() == '~') return parse_set(s.substr(1)).complement();
    if (s == "all") return IndexSet::all();
    if (s == "none") return IndexSet::none();
    if (s == "evens") return IndexSet::evens();
    if (s == "odds") return IndexSet::odds();
    if (s == "squares") return IndexSet::squares();
    if (s == "pow2") return IndexSet::powers_of_two();
    if (s == "blocks") return IndexSet::sparse_blocks();
    if (s == "geom3") return IndexSet::geometric3();
    if (s.rfind("mod", 0) == 0 && s.find('=') != std::string::npos) {
        const auto eq = s.find('=');
        try {
            return IndexSet::residues(to_count(s.substr(3, eq - 3)), count_list(s.substr(eq + 1)));
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    if (s.rfind("fin=", 0) == 0) return IndexSet::finite(count_list(s.substr(4)));
    if (s.rfind("range=", 0) == 0) {
        const auto dots = s.find("..");
        if (dots == std::string::npos) throw UsageError("range is range=a..b");
        return IndexSet::range(to_count(s.substr(6, dots - 6)), to_count(s.substr(dots + 2)));
    }
    throw UsageError("unknown index set: " + s);
}

std::size_t point(const FinitePMSpace& S, const std::string& name) {
    try {
        return S.index_of(name);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

IndexedSequence parse_seq(const FinitePMSpace& S, const std::string& spec, std::uint64_t seed) {
    if (spec.empty()) throw UsageError("--seq is required");
    const auto head = split(spec, ':', 2);
    const std::string& kind = head[0];
    if (kind == "const" && head.size() == 2) return IndexedSequence::constant(point(S, head[1]));
    if (kind == "except") {
        const auto parts = split(spec, ':');
        if (parts.size() != 3 && parts.size() != 4) throw UsageError("sequence is except:L:<set>[:r]");
        const std::size_t L = point(S, parts[1]);
        const IndexSet E = parse_set(parts[2]);
        std::size_t r = L == 0 ? 1 : 0;
        if (parts.size() == 4) r = point(S, parts[3]);
        if (S.size() < 2 && parts.size() == 3) throw UsageError("except needs a second point");
        IndexedSequence x = IndexedSequence::eventually(L, E, r);
        x.annotation.witnesses = {{L, E.complement()}};
        return x;
    }
    if (kind == "alternate") {
        const auto parts = split(spec, ':');
        const auto pq = parts.size() == 3 ? split(parts[1], ',') : std::vector<std::string>{};
        if (pq.size() != 2) throw UsageError("sequence is alternate:p,q:<set>");
        const std::size_t p = point(S, pq[0]), q = point(S, pq[1]);
        const IndexSet E = parse_set(parts[2]);
        IndexedSequence x = IndexedSequence::alternator({p, q}, {E, IndexSet::all()});
        x.annotation.witnesses = {{p, E}, {q, E.complement()}};
        return x;
    }
    if (kind == "splice") {
        const auto parts = split(spec, ':', 4);
        if (parts.size() != 4) throw UsageError("sequence is splice:L:<set>:<inner>");
        const std::size_t L = point(S, parts[1]);
        const IndexSet M = parse_set(parts[2]);
        const IndexedSequence inner =
            parts[3] == "random" ? IndexedSequence::scrambled(S.size(), seed) : parse_seq(S, parts[3], seed);
        IndexedSequence y = splice(inner, M, L);
        y.annotation.witnesses = {{L, M.complement()}};
        return y;
    }
    throw UsageError("unknown sequence: " + spec);
}

json verdict_json(const Verdict& v) {
    json j{{"verdict", to_string(v.status)},
           {"value", v.value},
           {"residual", v.residual},
           {"liminf", v.liminf},
           {"limsup", v.limsup}};
    if (!v.note.empty()) j["note"] = v.note;
    return j;
}

json names_json(const FinitePMSpace& S, const PointSet& ps) {
    json out = json::array();
    for (std::size_t p : ps) out.push_back(S.name(p));
    return out;
}

std::string fixed_to_tol(double v, double tol) {
    const int decimals = std::max(0, static_cast<int>(std::ceil(-std::log10(tol) - 1e-9)));
    std::ostringstream os;
    os << std::fixed << std::setprecision(decimals) << v;
    std::string s = os.str();
    if (s.find('.') != std::string::npos) {
        while (s.back() == '0') s.pop_back();
        if (s.back() == '.') s.pop_back();
    }
    return s;
}

std::string pass_line(bool ok, const std::string& what) { return std::string(ok ? "PASS " : "FAIL ") + what + "\n"; }

std::string join(const json& names) {
    std::string out = "{";
    for (std::size_t i = 0; i < names.size(); ++i) out += (i ? ", " : "") + names[i].get<std::string>();
    return out + "}";
}

// ---------------------------------------------------------------- commands

Outcome run_dl(const Options& o) {
    const StepDistFn f = parse_step(o.f), g = parse_step(o.g);
    const double d = levy_distance(f, g, o.dl_tol);
    Outcome out{"ok", {}, fixed_to_tol(d, o.dl_tol) + "\n", {}};
    out.result = {{"f", step_to_json(f)}, {"g", step_to_json(g)}, {"distance", d}};
    return out;
}

Outcome run_tnorm_check(const Options& o) {
    TriangleFn tau = TriangleFn::maximal();
    try {
        tau = TriangleFn::from_tag(o.tnorm);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    Rng rng(o.seed);
    std::vector<StepDistFn> sample;
    for (std::size_t i = 0; i < o.samples; ++i) sample.push_back(random_step_fn(rng));
    const auto rep = check_triangle_axioms(tau, sample, o.dl_tol);
    Outcome out{rep.passed() ? "pass" : "fail", {}, {}, {}};
    json checks = json::array();
    for (const auto& c : rep.checks) {
        checks.push_back({{"axiom", c.axiom}, {"passed", c.passed}, {"worst_residual", c.worst_residual}, {"cases", c.cases}});
        out.summary += pass_line(c.passed, c.axiom + " (" + std::to_string(c.cases) + " cases)");
    }
    out.result = {{"tnorm", o.tnorm}, {"checks", checks}};
    return out;
}

Outcome run_space_validate(const Options& o) {
    Outcome out;
    json violation = nullptr;
    json info;
    try {
        const FinitePMSpace S = load_space(o.space);
        const auto rep = validate_axioms(S);
        if (rep.violation) {
            violation = {{"axiom", rep.violation->axiom}, {"witness", rep.violation->witness}, {"message", rep.violation->message}};
        }
        info = {{"points", S.points()},
                {"tnorm", S.tau().tag()},
                {"pairs_checked", rep.pairs_checked},
                {"triples_checked", rep.triples_checked},
                {"gap_grid", S.gap_grid()}};
    } catch (const SpaceError& e) {
        const auto& v = e.violation();
        violation = {{"axiom", v.axiom}, {"witness", v.witness}, {"message", v.message}};
    }
    const bool ok = violation.is_null();
    out.status = ok ? "pass" : "fail";
    out.result = {{"passed", ok}, {"violation", violation}};
    if (!info.is_null()) out.result.update(info);
    out.summary = ok ? "PASS space axioms P-1..P-4\n"
                     : "FAIL " + violation["axiom"].get<std::string>() + ": " + violation["message"].get<std::string>() + "\n";
    return out;
}

Outcome run_matrix_check(const Options& o) {
    const SummMatrix A = parse_matrix(o.matrix);
    if (o.N < 10) throw UsageError("matrix-check needs --N >= 10");
    const auto rep = check_regularity(A, o.N, o.tol);
    Outcome out{rep.passed() ? "pass" : "fail", {}, {}, {}};
    json conds = json::array();
    for (const auto& c : rep.conditions) {
        conds.push_back({{"name", c.name}, {"passed", c.passed}, {"residual", c.residual}});
        std::ostringstream os;
        os << c.name << " residual " << c.residual;
        out.summary += pass_line(c.passed, os.str());
    }
    out.result = {{"matrix", A.name()},
                  {"conditions", conds},
                  {"running_sup", rep.running_sup},
                  {"sampled_columns", rep.sampled_columns}};
    return out;
}

Outcome run_density(const Options& o) {
    const SummMatrix A = parse_matrix(o.matrix);
    const Ideal I = parse_ideal(o.ideal);
    const IndexSet M = parse_set(o.set);
    const Verdict v = ai_density(A, I, M, o.N, o.tol);
    Outcome out{"ok", verdict_json(v), {}, {}};
    out.result["set"] = M.name();
    out.result["null"] = is_null(v, o.tol);
    out.result["nonthin"] = is_nonthin(v, o.tol);
    std::ostringstream os;
    os << "density of " << M.name() << ": " << v.value << " (" << to_string(v.status) << ", residual " << v.residual
       << ")\n";
    out.summary = os.str();
    return out;
}

struct SequenceContext {
    FinitePMSpace space;
    IndexedSequence sequence;
    std::unique_ptr<VisitFrequencies> vf;
};

SequenceContext sequence_context(const Options& o) {
    FinitePMSpace S = load_valid_space(o.space);
    IndexedSequence x = parse_seq(S, o.seq, o.seed);
    const SummMatrix A = parse_matrix(o.matrix);
    const Ideal I = parse_ideal(o.ideal);
    auto vf = std::make_unique<VisitFrequencies>(x.materialize(o.N), S.size(), A, I, o.tol);
    return {std::move(S), std::move(x), std::move(vf)};
}

Outcome run_converge(const Options& o) {
    const auto ctx = sequence_context(o);
    const FinitePMSpace& S = ctx.space;
    PointSet candidates;
    if (o.limit.empty()) {
        for (std::size_t p = 0; p < S.size(); ++p) candidates.insert(p);
    } else {
        candidates.insert(point(S, o.limit));
    }
    json cands = json::array();
    json limit = nullptr;
    for (std::size_t c : candidates) {
        const Verdict v = ai_stat_conv_detect(S, *ctx.vf, c);
        const Verdict s = strong_conv_detect(S, ctx.vf->values(), c);
        json j = verdict_json(v);
        j["point"] = S.name(c);
        j["strong"] = s.converged();
        j["strong_k0"] = s.value;
        cands.push_back(j);
        if (v.converged()) limit = S.name(c);
    }
    Outcome out{"ok", {{"sequence", ctx.sequence.description()}, {"candidates", cands}, {"limit", limit}}, {}, {}};
    out.summary = limit.is_null() ? "no A^I-statistical limit among the candidates\n"
                                  : "A^I-statistically convergent to " + limit.get<std::string>() + "\n";
    return out;
}

Outcome run_cauchy(const Options& o) {
    const auto ctx = sequence_context(o);
    const FinitePMSpace& S = ctx.space;
    const Verdict v = ai_stat_cauchy_detect(S, *ctx.vf);
    Outcome out{"ok", verdict_json(v), {}, {}};
    out.result["sequence"] = ctx.sequence.description();
    out.result["center"] = v.point ? json(S.name(*v.point)) : json(nullptr);
    json forms = nullptr;
    if (S.metric()) {
        const CauchyForms l = cauchy_forms(metric_sequence(S, ctx.vf->values()), ctx.vf->matrix(), ctx.vf->ideal(),
                                             o.tol, ctx.sequence.annotation.null_set);
        forms = {{"center_form", to_string(l.p1.status)},
                 {"null_set_form", to_string(l.p2.status)},
                 {"pairwise_form", to_string(l.p3.status)}};
    }
    out.result["metric_forms"] = forms;
    out.summary = v.converged() ? "A^I-statistically Cauchy\n" : std::string("not A^I-statistically Cauchy (") +
                                                                     to_string(v.status) + ")\n";
    return out;
}

Outcome run_lambda(const Options& o) {
    const auto ctx = sequence_context(o);
    const FinitePMSpace& S = ctx.space;
    PointSet all;
    for (std::size_t p = 0; p < S.size(); ++p) all.insert(p);
    const LambdaResult r = lambda_set(S, *ctx.vf, all, ctx.sequence.annotation.witnesses);
    Outcome out{"ok", {{"sequence", ctx.sequence.description()}, {"members", names_json(S, r.members)}, {"warnings", r.warnings}},
                {}, {}};
    out.summary = "Lambda = " + join(out.result["members"]) + "\n";
    for (const auto& w : r.warnings) out.summary += "warning: " + w + "\n";
    return out;
}

Outcome run_gamma(const Options& o) {
    const auto ctx = sequence_context(o);
    const FinitePMSpace& S = ctx.space;
    const GammaResult r = gamma_set(S, *ctx.vf);
    Outcome out{"ok",
                {{"sequence", ctx.sequence.description()},
                 {"members", names_json(S, r.members)},
                 {"inconclusive", names_json(S, r.inconclusive)}},
                {}, {}};
    out.summary = "Gamma = " + join(out.result["members"]) + "\n";
    return out;
}

Outcome run_suite(const Options& o) {
    SuiteConfig cfg;
    cfg.seed = o.seed;
    cfg.size = o.size;
    cfg.N = o.N;
    cfg.tol = o.tol;
    cfg.dl_tol = o.dl_tol;
    const SuiteReport rep = run_theorem_suite(generate_suite(cfg.seed, cfg.size), cfg);
    Outcome out{rep.passed() ? "pass" : "fail", {}, {}, report_json(rep)};
    std::size_t passed = 0;
    for (const auto& c : rep.checks) {
        passed += c.passed ? 1 : 0;
        if (!c.passed) {
            out.summary += "FAIL " + c.name + " (" + std::to_string(c.failures) + " of " + std::to_string(c.cases) + ")\n";
            for (const auto& w : c.counterexamples) out.summary += "    " + w + "\n";
        }
    }
    out.summary += "suite: " + std::to_string(passed) + "/" + std::to_string(rep.checks.size()) + " checks passed on " +
                   std::to_string(rep.instances.size()) + " instances\n";
    if (!o.csv.empty()) {
        std::ofstream csv(o.csv, std::ios::binary);
        if (!csv) throw std::runtime_error("cannot write " + o.csv);
        csv << report_csv(rep);
    }
    return out;
}

// ---------------------------------------------------------------- wiring

void add_common(Command& c, bool sequence_inputs) {
    Options& o = *c.opts;
    num_flag(c, "N", o.N, "horizon");
    num_flag(c, "tol", o.tol, "density tolerance");
    num_flag(c, "seed", o.seed, "seed (falls back to PMSTAT_SEED)", false);
    if (sequence_inputs) {
        str_flag(c, "space", o.space, "space JSON file or inline JSON");
        str_flag(c, "seq", o.seq, "const:L | except:L:<set>[:r] | alternate:p,q:<set> | splice:L:<set>:<inner>");
        str_flag(c, "matrix", o.matrix, "cesaro | identity | block:<theta> | sqweight | column1 | file:<path>");
        str_flag(c, "ideal", o.ideal, "fin | density:<matrix>");
    }
}

void add_output(Command& c) {
    str_flag(c, "out", c.opts->out, "write the JSON report here");
    c.app->add_option("--config", c.opts->config, "JSON file of flag values");
}

std::vector<Command> build_commands(CLI::App& app) {
    std::vector<Command> cmds;
    auto make = [&](const char* name, const char* desc, std::function<Outcome(const Options&)> run) -> Command& {
        cmds.emplace_back();
        cmds.back().app = app.add_subcommand(name, desc);
        cmds.back().run = std::move(run);
        return cmds.back();
    };
    cmds.reserve(10);
    {
        Command& c = make("dl", "Levy distance between two distribution functions", run_dl);
        str_flag(c, "f", c.opts->f, "eps:<b> or JSON jump list");
        str_flag(c, "g", c.opts->g, "eps:<b> or JSON jump list");
        num_flag(c, "dl-tol", c.opts->dl_tol, "bisection tolerance");
        add_output(c);
    }
    {
        Command& c = make("tnorm-check", "triangle-function axioms on random step functions", run_tnorm_check);
        str_flag(c, "tnorm", c.opts->tnorm, "min | prod | luka | maximal");
        num_flag(c, "samples", c.opts->samples, "sample size");
        num_flag(c, "dl-tol", c.opts->dl_tol, "comparison tolerance");
        num_flag(c, "seed", c.opts->seed, "seed (falls back to PMSTAT_SEED)", false);
        add_output(c);
    }
    {
        Command& c = make("space-validate", "check P-1..P-4 on a space file", run_space_validate);
        str_flag(c, "space", c.opts->space, "space JSON file or inline JSON");
        add_output(c);
    }
    {
        Command& c = make("matrix-check", "Silverman-Toeplitz conditions at a finite horizon", run_matrix_check);
        str_flag(c, "matrix", c.opts->matrix, "cesaro | identity | block:<theta> | sqweight | column1 | file:<path>");
        num_flag(c, "N", c.opts->N, "horizon");
        num_flag(c, "tol", c.opts->tol, "residual tolerance");
        add_output(c);
    }
    {
        Command& c = make("density", "A^I-density of an index set", run_density);
        str_flag(c, "set", c.opts->set, "evens | odds | squares | pow2 | blocks | geom3 | modM=r,.. | fin=a,.. | range=a..b | ~<set>");
        str_flag(c, "matrix", c.opts->matrix, "cesaro | identity | block:<theta> | sqweight | column1 | file:<path>");
        str_flag(c, "ideal", c.opts->ideal, "fin | density:<matrix>");
        num_flag(c, "N", c.opts->N, "horizon");
        num_flag(c, "tol", c.opts->tol, "density tolerance");
        add_output(c);
    }
    {
        Command& c = make("converge", "A^I-statistical convergence detector", run_converge);
        add_common(c, true);
        str_flag(c, "limit", c.opts->limit, "test only this point");
        add_output(c);
    }
    {
        Command& c = make("cauchy", "A^I-statistical Cauchy detector", run_cauchy);
        add_common(c, true);
        add_output(c);
    }
    {
        Command& c = make("lambda", "statistical limit points from the sequence witnesses", run_lambda);
        add_common(c, true);
        add_output(c);
    }
    {
        Command& c = make("gamma", "statistical cluster points", run_gamma);
        add_common(c, true);
        add_output(c);
    }
    {
        Command& c = make("suite", "generated instances and the full property suite", run_suite);
        c.opts->tol = 0.02;
        add_common(c, false);
        num_flag(c, "size", c.opts->size, "number of instances");
        num_flag(c, "dl-tol", c.opts->dl_tol, "Levy distance tolerance");
        str_flag(c, "csv", c.opts->csv, "write the CSV summary here");
        add_output(c);
    }
    return cmds;
}

void apply_config(Command& c) {
    const Options& o = *c.opts;
    if (!o.config.empty()) {
        const json j = read_json(o.config);
        if (!j.is_object()) throw UsageError("config must be a JSON object");
        for (const auto& [key, value] : j.items()) {
            auto it = std::find_if(c.flags.begin(), c.flags.end(), [&](const Flag& f) { return f.key == key; });
            if (it == c.flags.end()) throw UsageError("unknown config key for " + c.app->get_name() + ": " + key);
            if (it->opt->count() == 0) it->assign(value);
        }
    }
    auto seed = std::find_if(c.flags.begin(), c.flags.end(), [](const Flag& f) { return f.key == "seed"; });
    const bool seed_in_config = !o.config.empty() && read_json(o.config).contains("seed");
    if (seed != c.flags.end() && seed->opt->count() == 0 && !seed_in_config) {
        if (const char* env = std::getenv("PMSTAT_SEED")) {
            try {
                c.opts->seed = to_count(env);
            } catch (const UsageError&) {
                throw UsageError(std::string("PMSTAT_SEED is not a non-negative integer: ") + env);
            }
        }
    }
}

json resolved_config(const Command& c) {
    json j = json::object();
    for (const auto& f : c.flags) {
        if (f.key != "out" && f.key != "csv") j[f.key] = f.read();
    }
    return j;
}

bool has(const json& j, const char* key, json::value_t t) {
    if (!j.contains(key)) return false;
    const json& v = j[key];
    if (t == json::value_t::number_float) return v.is_number();
    return v.type() == t || (t == json::value_t::number_unsigned && v.is_number_integer());
}

}  // namespace

std::vector<std::string> validate_report(const json& r) {
    using T = json::value_t;
    std::vector<std::string> errs;
    if (!r.is_object()) return {"report is not an object"};
    if (!has(r, "command", T::string)) errs.push_back("missing command");
    if (!has(r, "status", T::string)) {
        errs.push_back("missing status");
        return errs;
    }
    const std::string status = r["status"];
    if (status != "ok" && status != "pass" && status != "fail" && status != "error") errs.push_back("bad status " + status);
    if (!has(r, "config", T::object)) errs.push_back("missing config object");
    if (status == "error") {
        if (!has(r, "error", T::string)) errs.push_back("error report without message");
        return errs;
    }
    if (!has(r, "result", T::object)) {
        errs.push_back("missing result object");
        return errs;
    }
    const json& res = r["result"];
    const std::string cmd = r.value("command", "");
    std::vector<std::pair<const char*, T>> need;
    if (cmd == "dl") need = {{"distance", T::number_float}, {"f", T::array}, {"g", T::array}};
    else if (cmd == "tnorm-check") need = {{"checks", T::array}};
    else if (cmd == "space-validate") need = {{"passed", T::boolean}};
    else if (cmd == "matrix-check") need = {{"conditions", T::array}, {"matrix", T::string}};
    else if (cmd == "density") need = {{"value", T::number_float}, {"verdict", T::string}, {"null", T::boolean}};
    else if (cmd == "converge") need = {{"candidates", T::array}};
    else if (cmd == "cauchy") need = {{"verdict", T::string}, {"value", T::number_float}};
    else if (cmd == "lambda" || cmd == "gamma") need = {{"members", T::array}};
    else if (cmd == "suite") need = {{"summary", T::object}, {"checks", T::array}, {"instances", T::array}};
    else errs.push_back("unknown command " + cmd);
    for (const auto& [key, type] : need) {
        if (!has(res, key, type)) errs.push_back(cmd + " result lacks " + key);
    }
    if (cmd == "converge" && !res.contains("limit")) errs.push_back("converge result lacks limit");
    if (cmd == "suite" && res.contains("checks") && res["checks"].is_array()) {
        for (const auto& c : res["checks"]) {
            if (!has(c, "name", T::string) || !has(c, "passed", T::boolean) || !has(c, "negative_control", T::boolean) ||
                !has(c, "cases", T::number_unsigned) || !has(c, "failures", T::number_unsigned) ||
                !has(c, "worst_residual", T::number_float)) {
                errs.push_back("malformed suite check entry");
                break;
            }
        }
    }
    return errs;
}

int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Statistical convergence tools for finite probabilistic metric spaces", "pmstat"};
    app.require_subcommand(1);
    std::vector<Command> cmds = build_commands(app);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    Command* cmd = nullptr;
    for (auto& c : cmds) {
        if (c.app->parsed()) cmd = &c;
    }
    if (!cmd) return 2;

    json doc{{"command", cmd->app->get_name()}};
    Outcome outcome;
    try {
        apply_config(*cmd);
        doc["config"] = resolved_config(*cmd);
        outcome = cmd->run(*cmd->opts);
        doc["status"] = outcome.status;
        doc["result"] = outcome.result;
    } catch (const UsageError& e) {
        err << "pmstat " << cmd->app->get_name() << ": " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        if (!doc.contains("config")) doc["config"] = json::object();
        doc["status"] = "error";
        doc["error"] = e.what();
        outcome = {"error", {}, std::string("error: ") + e.what() + "\n", {}};
    }

    std::string text = outcome.document.empty() ? doc.dump(2) + "\n" : outcome.document;
    const auto problems = validate_report(json::parse(text));
    if (!problems.empty()) {
        for (const auto& p : problems) err << "report schema: " << p << "\n";
        return 1;
    }
    out << outcome.summary;
    const std::string& path = cmd->opts->out;
    if (!path.empty()) {
        std::ofstream f(path, std::ios::binary);
        if (!f || !(f << text)) {
            err << "cannot write " << path << "\n";
            return 1;
        }
    }
    return outcome.status == "ok" || outcome.status == "pass" ? 0 : 1;
}

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"pmstat"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return dispatch(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace pmstat
