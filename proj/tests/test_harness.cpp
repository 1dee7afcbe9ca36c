#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <random>

#include "freedil/errors.hpp"
#include "freedil/harness.hpp"
#include "support.hpp"

using namespace freedil;
using namespace testing_support;

namespace {

std::filesystem::path temp_dir()
{
    const auto dir = std::filesystem::temp_directory_path() / "freedil_harness_tests";
    std::filesystem::create_directories(dir);
    return dir;
}

std::filesystem::path write_file(const std::string& name, const std::string& body)
{
    const auto p = temp_dir() / name;
    std::ofstream(p) << body;
    return p;
}

Scenario scalar_scenario(Mode mode, std::initializer_list<double> ts)
{
    Scenario sc;
    sc.mode = mode;
    for (double t : ts)
        sc.factors.push_back({scalar(t), State::basis_vector(1, 0)});
    return sc;
}

const ReportEntry* entry(const Report& r, const std::string& name)
{
    for (const auto& e : r.entries)
        if (e.name == name)
            return &e;
    return nullptr;
}

} // namespace

TEST_CASE("scenario round trip is bit exact")
{
    std::mt19937_64 rng(2);
    Scenario sc;
    sc.mode = Mode::free;
    sc.factors.push_back({random_contraction(2, rng, 1), State::from_vector(random_unit(2, rng))});
    sc.factors.push_back({random_contraction(1, rng, 2), State::from_density(random_density(1, rng))});
    sc.state = State::from_density(random_density(2, rng));
    sc.tol = 3.7e-9;
    sc.seed = 0xfeedfacecafeULL;
    sc.samples = 17;
    const std::string once = sc.to_json().dump();
    const Scenario back = scenario_from_json(Json::parse(once));
    CHECK(back.to_json().dump() == once);
    CHECK(back.factors[0].matrix == sc.factors[0].matrix);
    CHECK(back.factors[0].state->vector() == sc.factors[0].state->vector());
}

TEST_CASE("ingest resolves file references and hashes them")
{
    write_file("m.json", R"({"rows": 1, "cols": 1, "data": [[[0.5, 0]]]})");
    write_file("s.json", R"({"kind": "vector", "dim": 1, "data": [[1, 0]]})");
    const auto path = write_file("sc.json", R"({"mode": "single", "factors": [{"matrix": "m.json", "state": "s.json"}],
        "degree": 2})");
    const Scenario sc = ingest(path);
    CHECK(sc.degree == 2);
    CHECK(sc.factors[0].matrix(0, 0) == Complex(0.5));
    REQUIRE(sc.input_hashes.size() == 3);
    CHECK(sc.input_hashes[0].second == sha256_file(path));
    CHECK(sc.input_hashes[0].second.size() == 64);
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("ingest errors name what is wrong")
{
    const auto non_unit = write_file(
        "nonunit.json", R"({"mode": "single", "factors": [{"matrix": {"rows": 1, "cols": 1, "data": [[[0.5, 0]]]},
        "state": {"kind": "vector", "dim": 1, "data": [[2, 0]]}}]})");
    try {
        ingest(non_unit);
        FAIL("expected an ingest error");
    } catch (const IngestError& e) {
        CHECK(std::string(e.what()).find("norm 2") != std::string::npos);
        CHECK(std::string(e.what()).find("/factors/0/state") != std::string::npos);
    }

    const auto not_psd = write_file(
        "notpsd.json", R"({"mode": "single", "factors": [{"matrix": {"rows": 2, "cols": 2,
        "data": [[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]},
        "state": {"kind": "density", "dim": 2, "data": [[[1.01, 0], [0, 0]], [[0, 0], [-0.01, 0]]]}}]})");
    try {
        ingest(not_psd);
        FAIL("expected an ingest error");
    } catch (const IngestError& e) {
        CHECK(std::string(e.what()).find("not PSD: eigenvalue -0.01") != std::string::npos);
    }

    const auto mismatch = write_file(
        "mismatch.json", R"({"mode": "single", "factors": [{"matrix": {"rows": 1, "cols": 1, "data": [[[0.5, 0]]]},
        "state": {"kind": "vector", "dim": 2, "data": [[1, 0], [0, 0]]}}]})");
    CHECK_THROWS_WITH_AS(ingest(mismatch), doctest::Contains("does not match"), IngestError);

    const auto syntax = write_file("syntax.json", "{\n  \"mode\": \"single\",\n  \"factors\": [,]\n}\n");
    CHECK_THROWS_WITH_AS(ingest(syntax), doctest::Contains("line 3"), IngestError);

    const auto bad_mode = write_file("badmode.json", R"({"mode": "quantum", "factors": []})");
    CHECK_THROWS_WITH_AS(ingest(bad_mode), doctest::Contains("/mode"), IngestError);

    CHECK_THROWS_AS(ingest(temp_dir() / "missing.json"), IngestError);

    const auto no_state = write_file(
        "nostate.json", R"({"mode": "free", "factors": [{"matrix": {"rows": 1, "cols": 1, "data": [[[0.5, 0]]]}}]})");
    CHECK_THROWS_WITH_AS(ingest(no_state), doctest::Contains("required"), IngestError);
}

TEST_CASE("malformed matrix file gives a single failing ingestion entry")
{
    write_file("broken_matrix.json", R"({"rows": 2, "cols": 2, "data": [[[1, 0]]]})");
    const auto path = write_file("uses_broken.json",
                                 R"({"mode": "single", "factors": [{"matrix": "broken_matrix.json"}]})");
    Report rep;
    try {
        rep = run_theorem_suite(ingest(path));
    } catch (const IngestError& e) {
        rep = ingestion_failure_report(path.string(), e.what());
    }
    REQUIRE(rep.entries.size() == 1);
    CHECK(rep.entries[0].name == "ingestion");
    CHECK(!rep.pass());
    CHECK(rep.entries[0].message.find("broken_matrix.json") != std::string::npos);
}

TEST_CASE("single mode suite on a scalar")
{
    Scenario sc = scalar_scenario(Mode::single, {0.5});
    sc.degree = 3;
    const Report rep = run_theorem_suite(sc);
    CHECK(rep.pass());
    for (const auto& e : rep.entries)
        CHECK(e.residual <= 1e-12);
    CHECK(entry(rep, "dilation") != nullptr);
    CHECK(entry(rep, "faithfulness")->pass);
}

TEST_CASE("free mode suite on the free Haar pair")
{
    Scenario sc = scalar_scenario(Mode::free, {0.0, 0.0});
    sc.tol = 1e-9;
    const Report rep = run_theorem_suite(sc);
    for (const char* name : {"unitarity", "dilation", "freeness", "trace", "oracle"}) {
        const ReportEntry* e = entry(rep, name);
        REQUIRE(e != nullptr);
        CHECK_MESSAGE(e->pass, name);
    }
    CHECK(rep.pass());
    CHECK(rep.summary["fock_dim"] == 241);
}

TEST_CASE("doubly and tensor suites")
{
    Scenario d;
    d.mode = Mode::doubly;
    d.degree = 2;
    d.factors.push_back({mat2(0.5, 0, 0, 0.3), std::nullopt});
    d.factors.push_back({mat2(0.2, 0, 0, 0.9), std::nullopt});
    CHECK(run_theorem_suite(d).pass());

    d.factors[1].matrix = mat2(0, 0.5, 0, 0);
    const Report bad = run_theorem_suite(d);
    CHECK(!bad.pass());
    CHECK(!entry(bad, "input_double_commutation")->pass);
    CHECK(!entry(bad, "construction")->pass);
    CHECK(entry(bad, "construction")->message.find("1") != std::string::npos);

    Scenario t;
    t.mode = Mode::tensor;
    t.factors.push_back({mat2(0.5, 0.2, 0, Complex(0.1, 0.3)), State::basis_vector(2, 0)});
    t.factors.push_back({mat2(0, 0.7, 0, 0), State::maximally_mixed(2)});
    t.tol = 1e-9;
    const Report tr = run_theorem_suite(t);
    CHECK(tr.pass());
    CHECK(entry(tr, "tensor_independence")->residual <= 1e-9);
}

TEST_CASE("construction errors become failing entries")
{
    const Report rep = run_theorem_suite(scalar_scenario(Mode::single, {1.5}));
    CHECK(!rep.pass());
    REQUIRE(!rep.entries.empty());
    CHECK(rep.entries[0].name == "construction");
    CHECK(rep.entries[0].message.find("not a contraction") != std::string::npos);

    Scenario sc = scalar_scenario(Mode::free, {0.5, 0.5});
    sc.degree = 0;
    const Report invalid = run_theorem_suite(sc);
    CHECK(!invalid.pass());
}

TEST_CASE("overall pass is the conjunction of entries")
{
    Report r;
    CHECK(!r.pass());
    r.entries.push_back({"a", 0.0, Json::object(), "", true, "", 0.0, {}});
    CHECK(r.pass());
    r.entries.push_back({"b", 1.0, Json::object(), "w", false, "", 0.0, {}});
    CHECK(!r.pass());
    CHECK(r.to_json()["pass"] == false);
    CHECK(r.to_text().find("FAIL") != std::string::npos);
}

TEST_CASE("reports are deterministic modulo timing")
{
    Scenario sc = scalar_scenario(Mode::free, {0.5, 0.3});
    sc.seed = 42;
    const auto a = strip_timing(run_theorem_suite(sc).to_json()).dump();
    const auto b = strip_timing(run_theorem_suite(sc).to_json()).dump();
    CHECK(a == b);
    CHECK(a.find("wall_ms") == std::string::npos);
    CHECK(run_theorem_suite(sc).to_json().dump().find("wall_ms") != std::string::npos);
}

TEST_CASE("families")
{
    const Scenario sc = scalar_scenario(Mode::free, {0.5, 0.3});
    const Family in = build_family(sc, false);
    const Family out = build_family(sc, true);
    CHECK(in.gens.size() == 2);
    CHECK(in.state.dim() == 1);
    CHECK(out.state.dim() == 241);
}
