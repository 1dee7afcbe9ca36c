// freedil: dilation constructions and their numerical certificates.
//
//   freedil suite        --input sc.json            run the scenario's theorem suite
//   freedil dilate       --input sc.json            single-operator dilation suite
//   freedil dilate-doubly --input sc.json           iterated dilation suite
//   freedil dilate-free  --input sc.json            free product dilation suite
//   freedil check --property tensor|free|trace|faithful --input sc.json
//   freedil moments --input sc.json --word "1 2*" --witness "centered 1 | 2"
//   freedil cumulants --moments 0,1,0,2
//   freedil ncpartitions --k 4
//   freedil oracle --input sc.json --word "1 2 1*"
//
// Exit status: 0 pass, 1 a check failed, 2 the input could not be ingested,
// 3 a runtime error, 64 bad usage.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "freedil/checks.hpp"
#include "freedil/errors.hpp"
#include "freedil/harness.hpp"
#include "freedil/moment_engine.hpp"
#include "freedil/oracle.hpp"
#include "freedil/partitions.hpp"

using namespace freedil;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitIngest = 2;
constexpr int kExitRuntime = 3;
constexpr int kExitUsage = 64;

struct Globals {
    std::string input;
    std::string output;
    std::string format = "json";
    std::optional<double> tol;
    std::optional<int> degree;
    std::optional<int> trunc;
    std::optional<int> max_alt;
    std::optional<int> samples;
    std::optional<std::uint64_t> seed;
    std::optional<int> poly_degree;
    bool minimal = false;
    bool no_timing = false;
    std::string family = "dilated";
};

void emit(const Globals& g, const Json& j, const std::string& text)
{
    const std::string body = g.format == "text" ? text : j.dump(2) + "\n";
    if (g.output.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream out(g.output);
    if (!out)
        throw Error("cannot write " + g.output);
    out << body;
}

Scenario load_scenario(const Globals& g, std::optional<Mode> force)
{
    if (g.input.empty())
        throw IngestError("--input is required");
    Scenario sc = ingest(g.input);
    if (force)
        sc.mode = *force;
    if (g.tol)
        sc.tol = *g.tol;
    if (g.degree)
        sc.degree = *g.degree;
    if (g.trunc)
        sc.trunc = *g.trunc;
    if (g.max_alt)
        sc.max_alt = *g.max_alt;
    if (g.samples)
        sc.samples = *g.samples;
    if (g.seed)
        sc.seed = *g.seed;
    if (g.poly_degree)
        sc.poly_degree = *g.poly_degree;
    if (g.minimal)
        sc.minimal = true;
    sc.validate();
    return sc;
}

int run_suite(const Globals& g, std::optional<Mode> force)
{
    Report rep;
    try {
        rep = run_theorem_suite(load_scenario(g, force));
    } catch (const Error& e) {
        rep = ingestion_failure_report(g.input, e.what());
        emit(g, rep.to_json(!g.no_timing), rep.to_text());
        return kExitIngest;
    }
    emit(g, rep.to_json(!g.no_timing), rep.to_text());
    return rep.pass() ? kExitPass : kExitFail;
}

std::string check_text(const CheckReport& c)
{
    std::ostringstream os;
    os << "property: " << c.property << "\nmax_residual: " << c.max_residual << "\nworst_witness: " << c.worst_witness
       << "\npass: " << (c.pass ? "true" : "false") << '\n';
    for (const auto& [name, v] : c.parts)
        os << "  " << name << ": " << v << '\n';
    if (!c.note.empty())
        os << "note: " << c.note << '\n';
    return os.str();
}

int run_check(const Globals& g, const std::string& property)
{
    const Scenario sc = load_scenario(g, std::nullopt);
    const Family fam = build_family(sc, g.family == "dilated");
    if (property == "faithful") {
        FaithfulnessOptions fo;
        fo.degree = sc.poly_degree;
        const auto fr = faithfulness_check(fam.state, fam.gens, fo);
        Json j = fr.to_json();
        j["property"] = "faithful";
        j["budgets"] = {{"degree", fo.degree}, {"rank_tol", fo.rank_tol}};
        j["max_residual"] = fr.span_dim - fr.gram_rank;
        j["worst_witness"] = "";
        j["pass"] = fr.faithful_on_span;
        std::ostringstream os;
        os << "faithful_on_span: " << (fr.faithful_on_span ? "true" : "false") << "\nspan_dim: " << fr.span_dim
           << "\ngram_rank: " << fr.gram_rank << "\nwords: " << fr.words << '\n';
        emit(g, j, os.str());
        return fr.faithful_on_span ? kExitPass : kExitFail;
    }
    CheckReport c;
    if (property == "tensor") {
        TensorCheckOptions o;
        o.degree = sc.poly_degree;
        o.samples = sc.samples;
        o.seed = sc.seed;
        o.tol = sc.tol;
        c = tensor_independence_check(fam.state, fam.gens, o);
    } else if (property == "free") {
        FreeCheckOptions o;
        o.max_len = sc.mode == Mode::free ? std::min(sc.max_alt, sc.trunc) : sc.max_alt;
        o.degree = sc.poly_degree;
        o.samples = sc.samples;
        o.seed = sc.seed;
        o.tol = sc.tol;
        c = free_independence_check(fam.state, fam.gens, o);
    } else {
        TraceCheckOptions o;
        o.degree = sc.poly_degree;
        o.samples = sc.samples;
        o.seed = sc.seed;
        o.tol = sc.tol;
        if (sc.mode == Mode::free)
            o.max_alternation = sc.trunc;
        c = trace_check(fam.state, fam.gens, o);
    }
    emit(g, c.to_json(), check_text(c));
    return c.pass ? kExitPass : kExitFail;
}

std::vector<Word> split_words(const std::string& text)
{
    std::vector<Word> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, '|')) {
        const auto first = part.find_first_not_of(' ');
        const auto last = part.find_last_not_of(' ');
        const std::string trimmed = first == std::string::npos ? "" : part.substr(first, last - first + 1);
        out.push_back(trimmed == "1" ? Word{} : Word::parse(trimmed));
    }
    return out;
}

Json complex_json(Complex z) { return complex_to_json(z); }

// Re-evaluates a witness string produced by a check.
Json evaluate_witness(const std::string& witness, const Family& fam)
{
    const MomentEngine engine(fam.state, fam.gens);
    const auto starts = [&](const std::string& p) { return witness.rfind(p, 0) == 0; };
    Json j{{"witness", witness}};
    if (starts("centered ")) {
        const auto ws = split_words(witness.substr(9));
        std::vector<Element> els;
        for (const auto& w : ws)
            els.push_back(center(Element::from_word(w), fam.state, fam.gens));
        const Complex v = engine.moment(std::span<const Element>(els));
        j["value"] = complex_json(v);
        j["residual"] = std::abs(v);
    } else if (starts("factorization ")) {
        const auto ws = split_words(witness.substr(14));
        Word product;
        Complex factored = 1.0;
        for (const auto& w : ws) {
            product = product * w;
            factored *= engine.moment(w);
        }
        const Complex joint = engine.moment(product);
        j["joint"] = complex_json(joint);
        j["factored"] = complex_json(factored);
        j["residual"] = std::abs(joint - factored);
    } else if (starts("words ")) {
        const auto ws = split_words(witness.substr(6));
        if (ws.size() != 2)
            throw Error("trace witness needs two words");
        const Complex a = engine.moment(ws[0] * ws[1]);
        const Complex b = engine.moment(ws[1] * ws[0]);
        j["forward"] = complex_json(a);
        j["backward"] = complex_json(b);
        j["residual"] = std::abs(a - b);
    } else if (starts("commutator [")) {
        const auto close = witness.rfind(']');
        std::string inner = witness.substr(12, close - 12);
        std::replace(inner.begin(), inner.end(), ',', '|');
        const auto ws = split_words(inner);
        if (ws.size() != 2)
            throw Error("commutator witness needs two words");
        const ComplexMatrix a = evaluate_word(ws[0], fam.gens);
        const ComplexMatrix b = evaluate_word(ws[1], fam.gens);
        j["residual"] = (a * b - b * a).norm();
    } else {
        throw Error("witness \"" + witness +
                    "\" is not a word witness; rerun the check with the same --seed to reproduce it");
    }
    return j;
}

int run_moments(const Globals& g, const std::vector<std::string>& words, const std::vector<std::string>& witnesses)
{
    const Scenario sc = load_scenario(g, std::nullopt);
    const Family fam = build_family(sc, g.family == "dilated");
    const MomentEngine engine(fam.state, fam.gens);
    Json out{{"family", g.family}, {"dim", fam.state.dim()}, {"moments", Json::array()}, {"witnesses", Json::array()}};
    std::ostringstream text;
    for (const auto& w : words) {
        const Word word = w == "1" ? Word{} : Word::parse(w);
        const Complex v = engine.moment(word);
        out["moments"].push_back({{"word", w}, {"value", complex_json(v)}});
        text << w << "\t" << v.real() << (v.imag() < 0 ? " - " : " + ") << std::abs(v.imag()) << "i\n";
    }
    for (const auto& w : witnesses) {
        Json r = evaluate_witness(w, fam);
        text << w << "\tresidual " << r["residual"].get<double>() << '\n';
        out["witnesses"].push_back(std::move(r));
    }
    emit(g, out, text.str());
    return kExitPass;
}

std::vector<Complex> parse_sequence(const std::string& text)
{
    std::vector<Complex> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
        std::istringstream ps(part);
        double re = 0.0;
        double im = 0.0;
        ps >> re;
        if (!ps)
            throw Error("cannot parse \"" + part + "\" as a number");
        if (ps >> im) {
            // "re im" pairs
        }
        out.emplace_back(re, im);
    }
    return out;
}

int run_cumulants(const Globals& g, const std::string& moments_text, bool inverse)
{
    std::vector<Complex> in;
    if (!moments_text.empty()) {
        in = parse_sequence(moments_text);
    } else if (!g.input.empty()) {
        const Json j = read_json_file(g.input);
        for (std::size_t i = 0; i < j.size(); ++i)
            in.push_back(complex_from_json(j[i], "/" + std::to_string(i)));
    } else {
        throw IngestError("--moments or --input is required");
    }
    const auto out = inverse ? moments_from_cumulants(in) : free_cumulants(in);
    Json a = Json::array();
    Json b = Json::array();
    std::ostringstream text;
    for (std::size_t i = 0; i < in.size(); ++i) {
        a.push_back(complex_json(in[i]));
        b.push_back(complex_json(out[i]));
        text << (inverse ? "m" : "kappa") << i + 1 << "\t" << out[i].real() << (out[i].imag() < 0 ? " - " : " + ")
             << std::abs(out[i].imag()) << "i\n";
    }
    Json j = inverse ? Json{{"cumulants", a}, {"moments", b}} : Json{{"moments", a}, {"cumulants", b}};
    emit(g, j, text.str());
    return kExitPass;
}

int run_ncpartitions(const Globals& g, int k)
{
    const auto parts = noncrossing_partitions(k);
    Json list = Json::array();
    std::ostringstream text;
    for (const auto& p : parts) {
        list.push_back(p.to_string());
        text << p.to_string() << '\n';
    }
    text << "count " << parts.size() << '\n';
    emit(g, Json{{"k", k}, {"count", parts.size()}, {"partitions", list}}, text.str());
    return kExitPass;
}

int run_oracle(const Globals& g, const std::vector<std::string>& words, int haar)
{
    Marginals marginals;
    std::optional<Family> fam;
    if (haar > 0) {
        for (int i = 1; i <= haar; ++i)
            marginals[i] = haar_marginal();
    } else {
        const Scenario sc = load_scenario(g, std::nullopt);
        if (sc.mode != Mode::free)
            throw IngestError("oracle needs a free-mode scenario or --haar");
        fam = build_family(sc, g.family == "dilated");
        // Marginals come from the concrete family restricted to one factor.
        for (std::size_t i = 0; i < fam->gens.size(); ++i)
            marginals[static_cast<int>(i + 1)] = matrix_marginal(fam->gens[i], fam->state);
    }
    FreeMomentOracle oracle(marginals);
    std::optional<MomentEngine> engine;
    if (fam)
        engine.emplace(fam->state, fam->gens);
    Json out = Json::array();
    std::ostringstream text;
    for (const auto& w : words) {
        const Word word = w == "1" ? Word{} : Word::parse(w);
        const Complex v = oracle(word);
        Json e{{"word", w}, {"oracle", complex_json(v)}};
        text << w << "\toracle " << v.real() << (v.imag() < 0 ? " - " : " + ") << std::abs(v.imag()) << "i";
        if (engine) {
            const Complex m = engine->moment(word);
            e["matrix"] = complex_json(m);
            e["residual"] = std::abs(m - v);
            text << "\tmatrix residual " << std::abs(m - v);
        }
        text << '\n';
        out.push_back(std::move(e));
    }
    emit(g, Json{{"results", out}}, text.str());
    return kExitPass;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Finite unitary dilations and free product certificates"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", kVersion);

    Globals g;
    app.add_option("--input", g.input, "Scenario file (or input data for cumulants)");
    app.add_option("--output", g.output, "Write the report here instead of stdout");
    app.add_option("--format", g.format, "Report format")->check(CLI::IsMember({"json", "text"}));
    app.add_option("--tol", g.tol, "Pass threshold for residuals");
    app.add_option("--degree", g.degree, "Dilation degree N");
    app.add_option("--trunc-len", g.trunc, "Fock truncation length L");
    app.add_option("--max-alt", g.max_alt, "Maximal alternation length for free checks");
    app.add_option("--samples", g.samples, "Random samples per check");
    app.add_option("--seed", g.seed, "Seed for sampled checks");
    app.add_option("--poly-degree", g.poly_degree, "Polynomial degree of checked elements");
    app.add_flag("--no-timing", g.no_timing, "Omit wall-clock fields from JSON reports");
    app.add_flag("--minimal", g.minimal, "Cut each dilation to its minimal reducing subspace (free mode)");
    app.add_option("--family", g.family, "Which generators checks and moments use")
        ->check(CLI::IsMember({"input", "dilated"}));

    auto* suite = app.add_subcommand("suite", "Run the scenario's theorem suite");
    auto* dilate = app.add_subcommand("dilate", "Single-operator dilation suite");
    auto* dilate_doubly = app.add_subcommand("dilate-doubly", "Iterated dilation of a doubly commuting tuple");
    auto* dilate_free = app.add_subcommand("dilate-free", "Freely independent dilation on a truncated Fock space");

    std::string property;
    auto* check = app.add_subcommand("check", "Run one independence, trace or faithfulness check");
    check->add_option("--property", property)->required()->check(CLI::IsMember({"tensor", "free", "trace", "faithful"}));

    std::vector<std::string> words;
    std::vector<std::string> witnesses;
    auto* moments = app.add_subcommand("moments", "Evaluate state values of words and re-evaluate witnesses");
    moments->add_option("--word", words, "Word such as \"1 2* 1^2\"");
    moments->add_option("--witness", witnesses, "Witness string from a check report");

    std::string moment_text;
    bool inverse = false;
    auto* cumulants = app.add_subcommand("cumulants", "Free cumulants from moments");
    cumulants->add_option("--moments", moment_text, "Comma-separated values; \"re im\" for complex entries");
    cumulants->add_flag("--inverse", inverse, "Treat the input as cumulants and return moments");

    int k = 0;
    auto* ncp = app.add_subcommand("ncpartitions", "List non-crossing partitions of {1..k}");
    ncp->add_option("--k", k)->required();

    std::vector<std::string> oracle_words;
    int haar = 0;
    auto* oracle = app.add_subcommand("oracle", "Free mixed moments from marginals");
    oracle->add_option("--word", oracle_words)->required();
    oracle->add_option("--haar", haar, "Use n free Haar unitaries instead of a scenario");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (*suite)
            return run_suite(g, std::nullopt);
        if (*dilate)
            return run_suite(g, Mode::single);
        if (*dilate_doubly)
            return run_suite(g, Mode::doubly);
        if (*dilate_free)
            return run_suite(g, Mode::free);
        if (*check)
            return run_check(g, property);
        if (*moments)
            return run_moments(g, words, witnesses);
        if (*cumulants)
            return run_cumulants(g, moment_text, inverse);
        if (*ncp)
            return run_ncpartitions(g, k);
        if (*oracle)
            return run_oracle(g, oracle_words, haar);
    } catch (const IngestError& e) {
        std::cerr << "freedil: " << e.what() << '\n';
        return kExitIngest;
    } catch (const std::exception& e) {
        std::cerr << "freedil: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}
