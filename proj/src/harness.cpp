#include "freedil/harness.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "freedil/checks.hpp"
#include "freedil/dilation.hpp"
#include "freedil/errors.hpp"
#include "freedil/free_product.hpp"
#include "freedil/moment_engine.hpp"
#include "freedil/oracle.hpp"

namespace freedil {

std::string to_string(Mode m)
{
    switch (m) {
    case Mode::single:
        return "single";
    case Mode::doubly:
        return "doubly";
    case Mode::tensor:
        return "tensor";
    case Mode::free:
        return "free";
    }
    return "?";
}

Mode mode_from_string(const std::string& s)
{
    if (s == "single")
        return Mode::single;
    if (s == "doubly")
        return Mode::doubly;
    if (s == "tensor")
        return Mode::tensor;
    if (s == "free")
        return Mode::free;
    throw IngestError("/mode: expected single, doubly, tensor or free, got \"" + s + "\"");
}

// ---------------------------------------------------------------------------
// hashing

std::string sha256_hex(const std::string& bytes)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("sha256 failed");
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i)
        os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(digest[i]);
    return os.str();
}

std::string sha256_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IngestError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return sha256_hex(buf.str());
}

// ---------------------------------------------------------------------------
// scenarios

Json Scenario::to_json() const
{
    Json fs = Json::array();
    for (const auto& f : factors) {
        Json fj{{"matrix", matrix_to_json(f.matrix)}};
        if (f.state)
            fj["state"] = state_to_json(*f.state);
        fs.push_back(std::move(fj));
    }
    Json j{{"mode", freedil::to_string(mode)},
           {"factors", std::move(fs)},
           {"degree", degree},
           {"trunc", trunc},
           {"poly_degree", poly_degree},
           {"max_alt", max_alt},
           {"samples", samples},
           {"tol", tol},
           {"seed", seed},
           {"minimal", minimal}};
    if (state)
        j["state"] = state_to_json(*state);
    return j;
}

void Scenario::validate() const
{
    const auto positive = [](int v, const char* name) {
        if (v < 1)
            throw IngestError(std::string("/") + name + ": must be >= 1, got " + std::to_string(v));
    };
    positive(degree, "degree");
    positive(trunc, "trunc");
    positive(poly_degree, "poly_degree");
    positive(max_alt, "max_alt");
    positive(samples, "samples");
    if (!(tol > 0.0) || !std::isfinite(tol))
        throw IngestError("/tol: must be a positive number");
    if (factors.empty())
        throw IngestError("/factors: at least one factor is required");

    for (std::size_t i = 0; i < factors.size(); ++i) {
        const std::string where = "/factors/" + std::to_string(i);
        const auto& f = factors[i];
        if (f.matrix.rows() != f.matrix.cols() || f.matrix.rows() == 0)
            throw IngestError(where + "/matrix: expected a nonempty square matrix, got " + shape_of(f.matrix));
        if (f.state && f.state->dim() != f.matrix.rows())
            throw IngestError(where + "/state: dimension " + std::to_string(f.state->dim()) +
                              " does not match the matrix " + shape_of(f.matrix));
        if (!f.state && (mode == Mode::tensor || mode == Mode::free))
            throw IngestError(where + "/state: required in " + freedil::to_string(mode) + " mode");
        if (mode == Mode::doubly && f.matrix.rows() != factors.front().matrix.rows())
            throw IngestError(where + "/matrix: doubly mode needs a common dimension, got " + shape_of(f.matrix) +
                              " and " + shape_of(factors.front().matrix));
    }
    if (state && state->dim() != factors.front().matrix.rows())
        throw IngestError("/state: dimension " + std::to_string(state->dim()) + " does not match the factors");
}

namespace {

struct Loader {
    std::filesystem::path base;
    std::vector<std::pair<std::string, std::string>>* hashes;

    // Inline objects pass through; strings are file references.
    Json resolve(const Json& j, const std::string& where, std::string& source) const
    {
        if (!j.is_string()) {
            source = where;
            return j;
        }
        std::filesystem::path p = j.get<std::string>();
        if (p.is_relative())
            p = base / p;
        source = p.string();
        hashes->emplace_back(p.string(), sha256_file(p));
        return read_json_file(p.string());
    }
};

template <class T>
T field(const Json& j, const char* key, T fallback)
{
    if (!j.contains(key))
        return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const Json::exception&) {
        throw IngestError(std::string("/") + key + ": wrong type, got " + j.at(key).dump());
    }
}

} // namespace

Scenario scenario_from_json(const Json& j, const std::filesystem::path& base)
{
    if (!j.is_object())
        throw IngestError("scenario: expected a JSON object");
    Scenario sc;
    if (!j.contains("mode") || !j["mode"].is_string())
        throw IngestError("/mode: missing");
    sc.mode = mode_from_string(j["mode"].get<std::string>());
    sc.degree = field(j, "degree", sc.degree);
    sc.trunc = field(j, "trunc", sc.trunc);
    sc.poly_degree = field(j, "poly_degree", sc.poly_degree);
    sc.max_alt = field(j, "max_alt", sc.max_alt);
    sc.samples = field(j, "samples", sc.samples);
    sc.tol = field(j, "tol", sc.tol);
    sc.seed = field(j, "seed", sc.seed);
    sc.minimal = field(j, "minimal", sc.minimal);

    const Loader load{base, &sc.input_hashes};
    const double state_tol = std::max(sc.tol, kDefaultTol);
    if (!j.contains("factors") || !j["factors"].is_array())
        throw IngestError("/factors: expected an array");
    for (std::size_t i = 0; i < j["factors"].size(); ++i) {
        const Json& fj = j["factors"][i];
        const std::string where = "/factors/" + std::to_string(i);
        if (!fj.is_object() || !fj.contains("matrix"))
            throw IngestError(where + ": expected {\"matrix\", \"state\"}");
        ScenarioFactor f;
        std::string src;
        const Json mj = load.resolve(fj["matrix"], where + "/matrix", src);
        f.matrix = matrix_from_json(mj, src);
        if (fj.contains("state") && !fj["state"].is_null()) {
            const Json sj = load.resolve(fj["state"], where + "/state", src);
            f.state = state_from_json(sj, state_tol, src);
        }
        sc.factors.push_back(std::move(f));
    }
    if (j.contains("state") && !j["state"].is_null()) {
        std::string src;
        const Json sj = load.resolve(j["state"], "/state", src);
        sc.state = state_from_json(sj, state_tol, src);
    }
    sc.validate();
    return sc;
}

Scenario ingest(const std::filesystem::path& path)
{
    const std::string hash = sha256_file(path);
    const Json j = read_json_file(path.string());
    Scenario sc;
    try {
        sc = scenario_from_json(j, path.parent_path());
    } catch (const IngestError& e) {
        throw IngestError(path.string() + ": " + e.what());
    }
    sc.input_hashes.insert(sc.input_hashes.begin(), {path.string(), hash});
    return sc;
}

// ---------------------------------------------------------------------------
// reports

bool Report::pass() const
{
    if (entries.empty())
        return false;
    for (const auto& e : entries)
        if (!e.pass)
            return false;
    return true;
}

Json Report::to_json(bool timing) const
{
    Json hashes = Json::array();
    for (const auto& [path, sha] : input_hashes)
        hashes.push_back({{"path", path}, {"sha256", sha}});
    Json es = Json::array();
    for (const auto& e : entries) {
        Json ej{{"name", e.name},
                {"residual", e.residual},
                {"budget", e.budget},
                {"witness", e.witness},
                {"pass", e.pass}};
        if (!e.message.empty())
            ej["message"] = e.message;
        if (!e.detail.is_null())
            ej["detail"] = e.detail;
        if (timing)
            ej["wall_ms"] = e.wall_ms;
        es.push_back(std::move(ej));
    }
    return Json{{"version", kVersion}, {"input_hashes", hashes}, {"scenario", scenario},
                {"summary", summary},  {"entries", es},          {"pass", pass()}};
}

std::string Report::to_text() const
{
    std::size_t name_w = 5;
    for (const auto& e : entries)
        name_w = std::max(name_w, e.name.size());
    std::ostringstream os;
    os << std::left << std::setw(static_cast<int>(name_w)) << "check" << "  " << std::setw(12) << "residual"
       << "  " << std::setw(4) << "ok" << "  " << std::setw(9) << "ms" << "  witness\n";
    os << std::string(name_w + 2 + 12 + 2 + 4 + 2 + 9 + 2 + 7, '-') << '\n';
    for (const auto& e : entries) {
        std::ostringstream res;
        res << std::scientific << std::setprecision(3) << e.residual;
        std::ostringstream ms;
        ms << std::fixed << std::setprecision(1) << e.wall_ms;
        std::string tail = e.witness;
        if (!e.message.empty())
            tail += (tail.empty() ? "" : "  ") + ("[" + e.message + "]");
        os << std::left << std::setw(static_cast<int>(name_w)) << e.name << "  " << std::setw(12) << res.str()
           << "  " << std::setw(4) << (e.pass ? "pass" : "FAIL") << "  " << std::setw(9) << ms.str() << "  "
           << tail << '\n';
    }
    os << "overall: " << (pass() ? "pass" : "FAIL") << '\n';
    return os.str();
}

Json strip_timing(Json j)
{
    if (j.is_object()) {
        j.erase("wall_ms");
        for (auto& [key, value] : j.items())
            value = strip_timing(std::move(value));
    } else if (j.is_array()) {
        for (auto& value : j)
            value = strip_timing(std::move(value));
    }
    return j;
}

Report ingestion_failure_report(const std::string& source, const std::string& message)
{
    Report r;
    r.scenario = Json{{"source", source}};
    ReportEntry e;
    e.name = "ingestion";
    e.residual = std::numeric_limits<double>::quiet_NaN();
    e.pass = false;
    e.message = message;
    r.entries.push_back(std::move(e));
    return r;
}

// ---------------------------------------------------------------------------
// suites

namespace {

using Clock = std::chrono::steady_clock;

class Suite {
public:
    explicit Suite(Report& r) : report_(r) {}

    // Runs `fn`, which fills the entry; errors turn into a failing entry.
    bool run(const std::string& name, const std::function<void(ReportEntry&)>& fn)
    {
        ReportEntry e;
        e.name = name;
        const auto t0 = Clock::now();
        try {
            fn(e);
        } catch (const std::exception& ex) {
            e.pass = false;
            e.message = ex.what();
            if (e.residual == 0.0)
                e.residual = std::numeric_limits<double>::quiet_NaN();
        }
        e.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
        const bool ok = e.pass;
        report_.entries.push_back(std::move(e));
        return ok;
    }

private:
    Report& report_;
};

void fill_from_check(ReportEntry& e, const CheckReport& c)
{
    e.residual = c.max_residual;
    e.budget = c.budgets;
    e.witness = c.worst_witness;
    e.pass = c.pass;
    e.message = c.note;
    e.detail = c.to_json();
}

// All ordered words T_1(k_1) ... T_n(k_n) with |k_i| <= degree.
std::vector<SignedPowerWord> ordered_words(int n, int degree)
{
    std::vector<SignedPowerWord> out;
    SignedPowerWord cur;
    const auto rec = [&](auto&& self, int f) -> void {
        if (f > n) {
            out.push_back(cur);
            return;
        }
        for (int k = -degree; k <= degree; ++k) {
            cur.push_back({f, k});
            self(self, f + 1);
            cur.pop_back();
        }
    };
    rec(rec, 1);
    return out;
}

// Alternating nonnegative words with at most `max_len` letters and total degree <= degree.
std::vector<SignedPowerWord> free_power_words(int n, int degree, int max_len)
{
    std::vector<SignedPowerWord> out{{}};
    SignedPowerWord cur;
    const auto rec = [&](auto&& self, int budget) -> void {
        if (static_cast<int>(cur.size()) == max_len)
            return;
        for (int f = 1; f <= n; ++f) {
            if (!cur.empty() && cur.back().factor == f)
                continue;
            for (int k = 1; k <= budget; ++k) {
                cur.push_back({f, k});
                out.push_back(cur);
                self(self, budget - k);
                cur.pop_back();
            }
        }
    };
    rec(rec, degree);
    return out;
}

void dilation_entry(ReportEntry& e, const DilationResult& res, std::span<const ComplexMatrix> ts,
                    const std::vector<SignedPowerWord>& words, PowerDilationMode mode, double tol)
{
    e.budget = {{"degree", res.degree}, {"words", words.size()}, {"tol", tol}};
    if (res.max_alternation)
        e.budget["max_alternation"] = *res.max_alternation;
    double worst = 0.0;
    std::string witness;
    for (const auto& w : words) {
        const auto r = verify_power_dilation(res, ts, w, mode, tol);
        if (r.residual > worst || witness.empty()) {
            worst = std::max(worst, r.residual);
            witness = w.empty() ? "(empty)" : to_string(w);
        }
    }
    e.residual = worst;
    e.witness = witness;
    e.pass = worst <= tol;
}

void unitarity_entry(ReportEntry& e, std::span<const ComplexMatrix> us, double tol)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < us.size(); ++i) {
        const double r = unitarity_residual(us[i]);
        if (r > worst || e.witness.empty()) {
            worst = std::max(worst, r);
            e.witness = "U" + std::to_string(i + 1);
        }
    }
    e.residual = worst;
    e.budget = {{"tol", tol}};
    e.pass = worst <= tol;
}

void double_commutation_entry(ReportEntry& e, std::span<const ComplexMatrix> ms, const char* prefix, double tol)
{
    const auto r = double_commutation_residual(ms);
    e.residual = r.residual;
    e.budget = {{"tol", tol}};
    if (r.first)
        e.witness = std::string(prefix) + std::to_string(r.first) + ", " + prefix + std::to_string(r.second);
    e.pass = r.residual <= tol;
}

// Faithfulness of the input state on the span of words in t up to `degree`.
bool input_faithful(const State& s, const ComplexMatrix& t, int degree)
{
    const ComplexMatrix gens[] = {t};
    FaithfulnessOptions fo;
    fo.degree = degree;
    return faithfulness_check(s, gens, fo).faithful_on_span;
}

void faithful_entry(ReportEntry& e, const std::vector<bool>& expected, const std::vector<FaithfulnessReport>& got,
                    int degree)
{
    e.budget = {{"degree", degree}};
    Json parts = Json::array();
    int gap = 0;
    bool ok = true;
    std::vector<std::string> unclaimed;
    for (std::size_t i = 0; i < got.size(); ++i) {
        parts.push_back(got[i].to_json());
        const int g = got[i].span_dim - got[i].gram_rank;
        gap += g;
        if (!expected[i]) {
            unclaimed.push_back(std::to_string(i + 1));
            continue;
        }
        if (!got[i].faithful_on_span) {
            ok = false;
            if (e.witness.empty())
                e.witness = "factor " + std::to_string(i + 1) + ": span_dim " + std::to_string(got[i].span_dim) +
                            ", gram_rank " + std::to_string(got[i].gram_rank);
        }
    }
    e.residual = gap;
    e.detail = parts;
    e.pass = ok;
    if (!unclaimed.empty()) {
        std::string list;
        for (const auto& u : unclaimed)
            list += (list.empty() ? "" : ",") + u;
        e.message = "input state not faithful on span for factor " + list + "; reported only";
    }
}

void single_suite(const Scenario& sc, Report& rep, Suite& suite)
{
    const int n = static_cast<int>(sc.factors.size());
    for (int i = 1; i <= n; ++i) {
        const auto& f = sc.factors[static_cast<std::size_t>(i - 1)];
        const std::string tag = n > 1 ? "[" + std::to_string(i) + "]" : "";
        std::optional<DilationResult> res;
        const bool built = suite.run("construction" + tag, [&](ReportEntry& e) {
            res = finite_unitary_dilation(f.matrix, sc.degree, sc.tol);
            e.budget = {{"degree", sc.degree}};
            e.pass = true;
            rep.summary["ambient_dim" + tag] = res->ambient_dim;
        });
        if (!built)
            continue;
        suite.run("unitarity" + tag, [&](ReportEntry& e) { unitarity_entry(e, res->unitaries, sc.tol); });
        suite.run("dilation" + tag, [&](ReportEntry& e) {
            const ComplexMatrix ts[] = {f.matrix};
            dilation_entry(e, *res, ts, ordered_words(1, sc.degree), PowerDilationMode::tensor, sc.tol);
        });
        if (f.state) {
            suite.run("faithfulness" + tag, [&](ReportEntry& e) {
                const int d = std::min(sc.poly_degree, sc.degree);
                const State psi = push_forward(*f.state, res->embedding);
                FaithfulnessOptions fo;
                fo.degree = d;
                const auto fr = faithfulness_check(psi, res->unitaries, fo);
                faithful_entry(e, {input_faithful(*f.state, f.matrix, d)}, {fr}, d);
            });
        }
    }
}

void doubly_suite(const Scenario& sc, Report& rep, Suite& suite)
{
    std::vector<ComplexMatrix> ts;
    for (const auto& f : sc.factors)
        ts.push_back(f.matrix);
    suite.run("input_double_commutation",
              [&](ReportEntry& e) { double_commutation_entry(e, ts, "T", sc.tol); });
    std::optional<DilationResult> res;
    if (!suite.run("construction", [&](ReportEntry& e) {
            res = doubly_commuting_dilation(ts, sc.degree, sc.tol);
            e.budget = {{"degree", sc.degree}};
            e.pass = true;
            rep.summary["ambient_dim"] = res->ambient_dim;
        }))
        return;
    suite.run("unitarity", [&](ReportEntry& e) { unitarity_entry(e, res->unitaries, sc.tol); });
    suite.run("double_commutation", [&](ReportEntry& e) { double_commutation_entry(e, res->unitaries, "U", sc.tol); });
    suite.run("dilation", [&](ReportEntry& e) {
        dilation_entry(e, *res, ts, ordered_words(static_cast<int>(ts.size()), sc.degree), PowerDilationMode::tensor,
                       sc.tol);
    });
}

void tensor_suite(const Scenario& sc, Report& rep, Suite& suite)
{
    std::optional<TensorModel> model;
    if (!suite.run("tensor_model", [&](ReportEntry& e) {
            std::vector<std::pair<ComplexMatrix, State>> fs;
            for (const auto& f : sc.factors)
                fs.emplace_back(f.matrix, *f.state);
            model = make_tensor_independent(fs);
            e.pass = true;
            rep.summary["input_dim"] = model->state.dim();
        }))
        return;

    TensorCheckOptions to;
    to.degree = sc.poly_degree;
    to.samples = sc.samples;
    to.seed = sc.seed;
    to.tol = sc.tol;
    suite.run("input_tensor_independence",
              [&](ReportEntry& e) { fill_from_check(e, tensor_independence_check(model->state, model->gens, to)); });

    std::optional<DilationResult> res;
    if (!suite.run("construction", [&](ReportEntry& e) {
            res = doubly_commuting_dilation(model->gens, sc.degree, sc.tol);
            e.budget = {{"degree", sc.degree}};
            e.pass = true;
            rep.summary["ambient_dim"] = res->ambient_dim;
        }))
        return;
    suite.run("unitarity", [&](ReportEntry& e) { unitarity_entry(e, res->unitaries, sc.tol); });
    suite.run("double_commutation", [&](ReportEntry& e) { double_commutation_entry(e, res->unitaries, "U", sc.tol); });
    suite.run("dilation", [&](ReportEntry& e) {
        dilation_entry(e, *res, model->gens, ordered_words(static_cast<int>(model->gens.size()), sc.degree),
                       PowerDilationMode::tensor, sc.tol);
    });
    suite.run("tensor_independence", [&](ReportEntry& e) {
        const State psi = push_forward(model->state, res->embedding);
        fill_from_check(e, tensor_independence_check(psi, res->unitaries, to));
    });
}

FreeDilationScenario free_scenario(const Scenario& sc)
{
    std::vector<FreeFactor> fs;
    for (const auto& f : sc.factors)
        fs.push_back({f.matrix, *f.state});
    FreeDilationOptions fo;
    fo.degree = sc.degree;
    fo.trunc = sc.trunc;
    fo.tol = std::min(sc.tol, kDefaultTol);
    fo.minimal = sc.minimal;
    return free_unitary_dilation(fs, fo);
}

void free_suite(const Scenario& sc, Report& rep, Suite& suite)
{
    std::optional<FreeDilationScenario> fds;
    if (!suite.run("construction", [&](ReportEntry& e) {
            fds = free_scenario(sc);
            e.budget = {{"degree", sc.degree}, {"trunc", sc.trunc}, {"minimal", sc.minimal}};
            e.pass = true;
            Json kd = Json::array();
            for (const auto& v : fds->v)
                kd.push_back(v.rows());
            rep.summary["factor_dims"] = kd;
            rep.summary["fock_dim"] = fds->fock_k.dim();
            rep.summary["fock_dim_original"] = fds->fock_h.dim();
            rep.summary["exact_domain"] = fds->exact_domain();
        }))
        return;

    const int n = static_cast<int>(sc.factors.size());
    const int alt = std::min(sc.max_alt, sc.trunc);
    const State vacuum = dilated_state(*fds);

    suite.run("unitarity", [&](ReportEntry& e) {
        const Index domain = fds->exact_domain();
        double worst = 0.0;
        for (int i = 0; i < n; ++i) {
            const double r = truncated_unitarity_residual(fds->u()[static_cast<std::size_t>(i)], domain);
            if (r > worst || e.witness.empty()) {
                worst = std::max(worst, r);
                e.witness = "U" + std::to_string(i + 1);
            }
        }
        e.residual = worst;
        e.budget = {{"domain", domain}, {"tol", sc.tol}};
        e.pass = worst <= sc.tol;
    });
    suite.run("embedding_isometry", [&](ReportEntry& e) {
        const ComplexMatrix& j = fds->dilation.embedding.isometry();
        e.residual = (j.adjoint() * j - ComplexMatrix::Identity(j.cols(), j.cols())).norm();
        e.budget = {{"tol", sc.tol}};
        e.pass = e.residual <= sc.tol;
    });
    suite.run("state_compatibility", [&](ReportEntry& e) {
        const MomentEngine engine(vacuum, fds->u());
        double worst = 0.0;
        for (int i = 1; i <= n; ++i)
            for (int k = -sc.degree; k <= sc.degree; ++k) {
                const double r = std::abs(engine.moment(Word::power(i, k)) - fds->factor_moment(i, k));
                if (r > worst || e.witness.empty()) {
                    worst = std::max(worst, r);
                    e.witness = k == 0 ? "1" : Word::power(i, k).to_string();
                }
            }
        e.residual = worst;
        e.budget = {{"degree", sc.degree}, {"tol", sc.tol}};
        e.pass = worst <= sc.tol;
    });
    suite.run("dilation", [&](ReportEntry& e) {
        dilation_entry(e, fds->dilation, fds->s, free_power_words(n, sc.degree, alt), PowerDilationMode::free,
                       sc.tol);
    });
    suite.run("freeness", [&](ReportEntry& e) {
        FreeCheckOptions fo;
        fo.max_len = alt;
        fo.degree = sc.poly_degree;
        fo.samples = sc.samples;
        fo.seed = sc.seed;
        fo.tol = sc.tol;
        fill_from_check(e, free_independence_check(vacuum, fds->u(), fo));
    });
    suite.run("trace", [&](ReportEntry& e) {
        TraceCheckOptions to;
        to.degree = sc.poly_degree;
        to.samples = sc.samples;
        to.seed = sc.seed;
        to.tol = sc.tol;
        to.max_alternation = sc.trunc;
        fill_from_check(e, trace_check(vacuum, fds->u(), to));
    });
    suite.run("oracle", [&](ReportEntry& e) {
        Marginals marginals;
        for (int i = 1; i <= n; ++i)
            marginals[i] = unitary_marginal([&, i](int k) { return fds->factor_moment(i, k); });
        FreeMomentOracle oracle(marginals);
        const MomentEngine engine(vacuum, fds->u());
        std::vector<int> ids;
        for (int i = 1; i <= n; ++i)
            ids.push_back(i);
        const auto words = enumerate_words(ids, 1, alt);
        double worst = 0.0;
        for (const auto& w : words) {
            const double r = std::abs(engine.moment(w) - oracle(w));
            if (r > worst || e.witness.empty()) {
                worst = std::max(worst, r);
                e.witness = w.to_string();
            }
        }
        e.residual = worst;
        e.budget = {{"max_len", alt}, {"words", words.size()}, {"tol", sc.tol}};
        e.pass = worst <= sc.tol;
    });
    suite.run("faithfulness", [&](ReportEntry& e) {
        const int d = std::min(sc.poly_degree, sc.degree);
        if (sc.trunc - d < 1)
            throw BudgetError("faithfulness at degree " + std::to_string(d) + " needs trunc > " + std::to_string(d));
        FaithfulnessOptions fo;
        fo.degree = d;
        // Words of length <= L - d never meet the truncation under d letters.
        fo.domain_cols = fds->fock_k.prefix_shorter_than(sc.trunc - d + 1);
        std::vector<bool> expected;
        std::vector<FaithfulnessReport> got;
        for (int i = 1; i <= n; ++i) {
            const auto& f = sc.factors[static_cast<std::size_t>(i - 1)];
            expected.push_back(input_faithful(*f.state, f.matrix, d));
            const ComplexMatrix gens[] = {fds->u()[static_cast<std::size_t>(i - 1)]};
            got.push_back(faithfulness_check(vacuum, gens, fo));
        }
        faithful_entry(e, expected, got, d);
        e.budget["domain"] = fo.domain_cols;
    });
}

} // namespace

Report run_theorem_suite(const Scenario& sc)
{
    Report rep;
    rep.input_hashes = sc.input_hashes;
    try {
        rep.scenario = sc.to_json();
        sc.validate();
    } catch (const std::exception& ex) {
        return ingestion_failure_report("scenario", ex.what());
    }
    Suite suite(rep);
    switch (sc.mode) {
    case Mode::single:
        single_suite(sc, rep, suite);
        break;
    case Mode::doubly:
        doubly_suite(sc, rep, suite);
        break;
    case Mode::tensor:
        tensor_suite(sc, rep, suite);
        break;
    case Mode::free:
        free_suite(sc, rep, suite);
        break;
    }
    return rep;
}

namespace {

State common_state(const Scenario& sc)
{
    if (sc.state)
        return *sc.state;
    if (sc.factors.front().state)
        return *sc.factors.front().state;
    return State::maximally_mixed(sc.factors.front().matrix.rows());
}

std::vector<ComplexMatrix> factor_matrices(const Scenario& sc)
{
    std::vector<ComplexMatrix> ts;
    for (const auto& f : sc.factors) {
        if (f.matrix.rows() != sc.factors.front().matrix.rows())
            throw DimensionError("factor matrices have different dimensions; use the tensor or free mode");
        ts.push_back(f.matrix);
    }
    return ts;
}

} // namespace

Family build_family(const Scenario& sc, bool dilated)
{
    sc.validate();
    switch (sc.mode) {
    case Mode::single:
    case Mode::doubly: {
        auto ts = factor_matrices(sc);
        const State s = common_state(sc);
        if (!dilated)
            return {std::move(ts), s};
        DilationResult res = sc.mode == Mode::single && ts.size() == 1
                                  ? finite_unitary_dilation(ts.front(), sc.degree, sc.tol)
                                  : doubly_commuting_dilation(ts, sc.degree, sc.tol);
        return {std::move(res.unitaries), push_forward(s, res.embedding)};
    }
    case Mode::tensor: {
        std::vector<std::pair<ComplexMatrix, State>> fs;
        for (const auto& f : sc.factors)
            fs.emplace_back(f.matrix, *f.state);
        TensorModel model = make_tensor_independent(fs);
        if (!dilated)
            return {std::move(model.gens), std::move(model.state)};
        DilationResult res = doubly_commuting_dilation(model.gens, sc.degree, sc.tol);
        return {std::move(res.unitaries), push_forward(model.state, res.embedding)};
    }
    case Mode::free: {
        FreeDilationScenario fds = free_scenario(sc);
        if (!dilated)
            return {std::move(fds.s), State::basis_vector(fds.fock_h.dim(), 0)};
        State vacuum = dilated_state(fds);
        return {std::move(fds.dilation.unitaries), std::move(vacuum)};
    }
    }
    throw Error("unknown mode");
}

} // namespace freedil
