#include "freedil/checks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "freedil/moment_engine.hpp"

namespace freedil {

Json CheckReport::to_json() const
{
    Json parts_json = Json::object();
    for (const auto& [name, value] : parts)
        parts_json[name] = value;
    Json j{{"property", property},
           {"budgets", budgets},
           {"max_residual", max_residual},
           {"worst_witness", worst_witness},
           {"pass", pass},
           {"parts", parts_json}};
    if (!note.empty())
        j["note"] = note;
    return j;
}

Json FaithfulnessReport::to_json() const
{
    return Json{{"faithful_on_span", faithful_on_span}, {"span_dim", span_dim}, {"gram_rank", gram_rank},
                {"words", words}};
}

std::mt19937_64 derived_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

namespace {

// 53 random bits in [0, 1); fixed across standard library implementations.
double unit_interval(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::size_t pick(std::mt19937_64& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

std::string word_text(const Word& w) { return w.empty() ? "1" : w.to_string(); }

std::string join_words(std::span<const Word> ws, const char* sep)
{
    std::string out;
    for (std::size_t i = 0; i < ws.size(); ++i) {
        if (i)
            out += sep;
        out += word_text(ws[i]);
    }
    return out;
}

void require_dims(const State& s, std::span<const ComplexMatrix> gens, const char* what)
{
    for (const auto& g : gens)
        if (g.rows() != s.dim() || g.cols() != s.dim())
            throw DimensionError(std::string(what) + ": generator " + shape_of(g) + " on a state of dimension " +
                                 std::to_string(s.dim()));
}

struct Tracker {
    double max = 0.0;
    std::string witness;

    // The witness is only formatted when the residual is a new maximum.
    void offer(double r, auto&& make_witness)
    {
        if (r > max || witness.empty()) {
            max = std::max(max, r);
            witness = make_witness();
        }
    }
};

std::vector<std::vector<int>> alternating_patterns(int factors, int len)
{
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
    auto rec = [&](auto&& self) -> void {
        if (static_cast<int>(cur.size()) == len) {
            out.push_back(cur);
            return;
        }
        for (int f = 1; f <= factors; ++f) {
            if (!cur.empty() && cur.back() == f)
                continue;
            cur.push_back(f);
            self(self);
            cur.pop_back();
        }
    };
    rec(rec);
    return out;
}

std::string pattern_text(const std::vector<int>& p)
{
    std::string out;
    for (std::size_t i = 0; i < p.size(); ++i)
        out += (i ? "," : "") + std::to_string(p[i]);
    return out;
}

} // namespace

Complex random_disc(std::mt19937_64& rng)
{
    const double r = std::sqrt(unit_interval(rng));
    const double theta = 2.0 * std::numbers::pi * unit_interval(rng);
    return std::polar(r, theta);
}

Element random_element(int factor, int degree, std::mt19937_64& rng)
{
    const int factors[] = {factor};
    std::vector<Element::Term> terms;
    for (auto& w : enumerate_words(factors, 0, degree))
        terms.emplace_back(random_disc(rng), std::move(w));
    return Element(std::move(terms));
}

// ---------------------------------------------------------------------------

CheckReport tensor_independence_check(const State& s, std::span<const ComplexMatrix> gens,
                                      const TensorCheckOptions& opt)
{
    require_dims(s, gens, "tensor_independence_check");
    CheckReport rep;
    rep.property = "tensor";
    rep.budgets = {{"degree", opt.degree}, {"samples", opt.samples}, {"seed", opt.seed}, {"tol", opt.tol}};
    const int n = static_cast<int>(gens.size());
    if (n == 0) {
        rep.pass = true;
        rep.note = "no generators";
        return rep;
    }
    const MomentEngine engine(s, gens);

    std::vector<std::vector<Word>> words(static_cast<std::size_t>(n));
    std::vector<std::vector<ComplexMatrix>> mats(static_cast<std::size_t>(n));
    std::vector<std::vector<Complex>> values(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int f[] = {i + 1};
        words[i] = enumerate_words(f, 1, opt.degree);
        for (const auto& w : words[i]) {
            mats[i].push_back(evaluate_word(w, gens));
            values[i].push_back(engine.moment(w));
        }
    }

    // (a) commutation of the generated algebras
    Tracker comm;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (std::size_t a = 0; a < words[i].size(); ++a)
                for (std::size_t b = 0; b < words[j].size(); ++b) {
                    const double r = (mats[i][a] * mats[j][b] - mats[j][b] * mats[i][a]).norm();
                    comm.offer(r, [&] {
                        return "commutator [" + word_text(words[i][a]) + ", " + word_text(words[j][b]) + "]";
                    });
                }

    // (b) factorization over basis word tuples
    Tracker fact;
    double tuples = 1.0;
    for (const auto& ws : words)
        tuples *= static_cast<double>(ws.size());
    const bool exhaustive = tuples <= static_cast<double>(opt.exhaustive_limit);
    const auto eval_tuple = [&](const std::vector<std::size_t>& idx) {
        Word product;
        Complex factored = 1.0;
        std::vector<Word> parts;
        for (int i = 0; i < n; ++i) {
            product = product * words[i][idx[i]];
            factored *= values[i][idx[i]];
            parts.push_back(words[i][idx[i]]);
        }
        const double r = std::abs(engine.moment(product) - factored);
        fact.offer(r, [&] { return "factorization " + join_words(parts, " | "); });
    };
    std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
    std::size_t evaluated = 0;
    if (exhaustive) {
        while (true) {
            eval_tuple(idx);
            ++evaluated;
            int k = n - 1;
            while (k >= 0 && ++idx[k] == words[k].size())
                idx[k--] = 0;
            if (k < 0)
                break;
        }
    } else {
        for (int sample = 0; sample < opt.samples; ++sample) {
            auto rng = derived_rng(opt.seed, 0x7e5u, static_cast<std::uint64_t>(sample));
            for (int i = 0; i < n; ++i)
                idx[i] = pick(rng, words[i].size());
            eval_tuple(idx);
            ++evaluated;
        }
    }

    // (b') factorization over random elements
    for (int sample = 0; sample < opt.samples; ++sample) {
        std::vector<Element> els;
        Complex factored = 1.0;
        for (int i = 0; i < n; ++i) {
            auto rng = derived_rng(opt.seed, static_cast<std::uint64_t>(i + 1), static_cast<std::uint64_t>(sample));
            els.push_back(random_element(i + 1, opt.degree, rng));
            factored *= engine.moment(els.back());
        }
        const double r = std::abs(engine.moment(std::span<const Element>(els)) - factored);
        fact.offer(r, [&] { return "factorization of random elements, sample " + std::to_string(sample); });
    }

    rep.parts = {{"commutation", comm.max}, {"factorization", fact.max}};
    rep.budgets["word_tuples"] = evaluated;
    rep.budgets["mode"] = exhaustive ? "exhaustive" : "sampled";
    rep.max_residual = std::max(comm.max, fact.max);
    rep.worst_witness = comm.max >= fact.max ? comm.witness : fact.witness;
    rep.pass = rep.max_residual <= opt.tol;
    return rep;
}

// ---------------------------------------------------------------------------

CheckReport free_independence_check(const State& s, std::span<const ComplexMatrix> gens, const FreeCheckOptions& opt)
{
    require_dims(s, gens, "free_independence_check");
    CheckReport rep;
    rep.property = "free";
    rep.budgets = {{"max_len", opt.max_len},
                   {"degree", opt.degree},
                   {"samples", opt.samples},
                   {"seed", opt.seed},
                   {"tol", opt.tol}};
    const int n = static_cast<int>(gens.size());
    if (n < 2 || opt.max_len < 2) {
        rep.pass = true;
        rep.note = "vacuous: no alternating pattern of length >= 2";
        return rep;
    }
    const MomentEngine engine(s, gens);
    const ComplexMatrix& x = engine.state_block();

    // Centered basis: w - s(w) for words of length 1..degree in each factor.
    std::vector<std::vector<Word>> words(static_cast<std::size_t>(n));
    std::vector<std::vector<Element>> centered(static_cast<std::size_t>(n));
    std::vector<std::vector<Element>> centered_adj(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int f[] = {i + 1};
        words[i] = enumerate_words(f, 1, opt.degree);
        for (const auto& w : words[i]) {
            Element c = Element::from_word(w) - Element::unit() * engine.moment(w);
            centered_adj[i].push_back(c.adjoint());
            centered[i].push_back(std::move(c));
        }
    }

    Tracker basis_track;
    Tracker random_track;
    std::size_t patterns = 0;
    std::size_t evaluations = 0;
    bool all_exhaustive = true;
    for (int len = 2; len <= opt.max_len; ++len) {
        const auto pats = alternating_patterns(n, len);
        for (std::size_t pi = 0; pi < pats.size(); ++pi) {
            const auto& pat = pats[pi];
            ++patterns;
            const std::size_t half = pat.size() / 2;
            double count = 1.0;
            for (int f : pat)
                count *= static_cast<double>(words[f - 1].size());

            const auto witness = [&](const std::vector<std::size_t>& idx) {
                std::vector<Word> ws;
                for (std::size_t j = 0; j < pat.size(); ++j)
                    ws.push_back(words[pat[j] - 1][idx[j]]);
                return "centered " + join_words(ws, " | ");
            };

            if (count <= static_cast<double>(opt.exhaustive_limit)) {
                // Right halves a_{h+1} ... a_m X and left halves a_h* ... a_1* X.
                struct Branch {
                    std::vector<std::size_t> idx;
                    ComplexMatrix v;
                };
                std::vector<Branch> right{{{}, x}};
                for (std::size_t j = pat.size(); j > half; --j) {
                    std::vector<Branch> next;
                    const auto& basis = centered[pat[j - 1] - 1];
                    for (const auto& br : right)
                        for (std::size_t b = 0; b < basis.size(); ++b) {
                            auto idx = br.idx;
                            idx.insert(idx.begin(), b);
                            next.push_back({std::move(idx), engine.apply(basis[b], br.v)});
                        }
                    right = std::move(next);
                }
                std::vector<Branch> left{{{}, x}};
                for (std::size_t j = 0; j < half; ++j) {
                    std::vector<Branch> next;
                    const auto& basis = centered_adj[pat[j] - 1];
                    for (const auto& br : left)
                        for (std::size_t b = 0; b < basis.size(); ++b) {
                            auto idx = br.idx;
                            idx.push_back(b);
                            next.push_back({std::move(idx), engine.apply(basis[b], br.v)});
                        }
                    left = std::move(next);
                }
                for (const auto& l : left)
                    for (const auto& r : right) {
                        const double res = std::abs(MomentEngine::pairing(l.v, r.v));
                        ++evaluations;
                        basis_track.offer(res, [&] {
                            auto idx = l.idx;
                            idx.insert(idx.end(), r.idx.begin(), r.idx.end());
                            return witness(idx);
                        });
                    }
            } else {
                all_exhaustive = false;
                for (int sample = 0; sample < opt.samples; ++sample) {
                    auto rng = derived_rng(opt.seed, 0xb45e0000u + patterns, static_cast<std::uint64_t>(sample));
                    std::vector<std::size_t> idx;
                    std::vector<Element> els;
                    for (int f : pat) {
                        idx.push_back(pick(rng, words[f - 1].size()));
                        els.push_back(centered[f - 1][idx.back()]);
                    }
                    const double res = std::abs(engine.moment(std::span<const Element>(els)));
                    ++evaluations;
                    basis_track.offer(res, [&] { return witness(idx); });
                }
            }

            // Random centered elements.
            for (int sample = 0; sample < opt.samples; ++sample) {
                std::vector<Element> els;
                for (std::size_t j = 0; j < pat.size(); ++j) {
                    auto rng = derived_rng(opt.seed, (patterns << 8) + j, static_cast<std::uint64_t>(sample));
                    Element a = random_element(pat[j], opt.degree, rng);
                    els.push_back((a - Element::unit() * engine.moment(a)).simplified());
                }
                const double res = std::abs(engine.moment(std::span<const Element>(els)));
                ++evaluations;
                random_track.offer(res, [&] {
                    return "pattern " + pattern_text(pat) + ", random centered elements, sample " +
                           std::to_string(sample);
                });
            }
        }
    }

    rep.parts = {{"basis_words", basis_track.max}, {"random_elements", random_track.max}};
    rep.budgets["patterns"] = patterns;
    rep.budgets["evaluations"] = evaluations;
    rep.budgets["mode"] = all_exhaustive ? "exhaustive" : "sampled";
    rep.max_residual = std::max(basis_track.max, random_track.max);
    rep.worst_witness = basis_track.max >= random_track.max ? basis_track.witness : random_track.witness;
    rep.pass = rep.max_residual <= opt.tol;
    return rep;
}

// ---------------------------------------------------------------------------

CheckReport trace_check(const State& s, std::span<const ComplexMatrix> gens, const TraceCheckOptions& opt)
{
    require_dims(s, gens, "trace_check");
    CheckReport rep;
    rep.property = "trace";
    rep.budgets = {{"degree", opt.degree},
                   {"samples", opt.samples},
                   {"seed", opt.seed},
                   {"tol", opt.tol},
                   {"max_alternation", opt.max_alternation}};
    const MomentEngine engine(s, gens);
    const ComplexMatrix& x = engine.state_block();

    std::vector<int> factors;
    for (std::size_t i = 0; i < gens.size(); ++i)
        factors.push_back(static_cast<int>(i + 1));
    std::vector<Word> words;
    for (auto& w : enumerate_words(factors, 1, opt.degree))
        if (opt.max_alternation <= 0 || w.alternation() <= opt.max_alternation)
            words.push_back(std::move(w));

    std::vector<ComplexMatrix> fwd;
    std::vector<ComplexMatrix> bwd;
    for (const auto& w : words) {
        fwd.push_back(engine.apply(w, x));
        bwd.push_back(engine.apply(w.adjoint(), x));
    }

    Tracker track;
    const auto eval_pair = [&](std::size_t a, std::size_t b) {
        // s(w_a w_b) = <w_b X, w_a* X>
        const Complex ab = MomentEngine::pairing(bwd[a], fwd[b]);
        const Complex ba = MomentEngine::pairing(bwd[b], fwd[a]);
        track.offer(std::abs(ab - ba),
                    [&] { return "words " + word_text(words[a]) + " | " + word_text(words[b]); });
    };
    const double pairs = static_cast<double>(words.size()) * static_cast<double>(words.size());
    const bool exhaustive = pairs <= static_cast<double>(opt.exhaustive_limit);
    std::size_t evaluated = 0;
    if (exhaustive) {
        for (std::size_t a = 0; a < words.size(); ++a)
            for (std::size_t b = 0; b < words.size(); ++b, ++evaluated)
                eval_pair(a, b);
    } else {
        for (int sample = 0; sample < opt.samples; ++sample, ++evaluated) {
            auto rng = derived_rng(opt.seed, 0x7aceu, static_cast<std::uint64_t>(sample));
            const std::size_t a = pick(rng, words.size());
            const std::size_t b = pick(rng, words.size());
            eval_pair(a, b);
        }
    }
    rep.budgets["pairs"] = evaluated;
    rep.budgets["mode"] = exhaustive ? "exhaustive" : "sampled";
    rep.max_residual = track.max;
    rep.worst_witness = track.witness;
    rep.pass = rep.max_residual <= opt.tol;
    return rep;
}

// ---------------------------------------------------------------------------

int psd_rank(const ComplexMatrix& gram, double rel_tol)
{
    if (gram.rows() == 0)
        return 0;
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(0.5 * (gram + gram.adjoint()), Eigen::EigenvaluesOnly);
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double top = ev.maxCoeff();
    if (top <= 0.0)
        return 0;
    return static_cast<int>((ev.array() > rel_tol * top).count());
}

FaithfulnessReport faithfulness_check(const State& s, std::span<const ComplexMatrix> gens,
                                      const FaithfulnessOptions& opt)
{
    require_dims(s, gens, "faithfulness_check");
    std::vector<int> factors;
    for (std::size_t i = 0; i < gens.size(); ++i)
        factors.push_back(static_cast<int>(i + 1));
    double count = 0.0;
    for (int k = 0; k <= opt.degree; ++k)
        count += std::pow(2.0 * static_cast<double>(gens.size()), k);
    if (count > static_cast<double>(opt.max_words))
        throw BudgetError("faithfulness_check: " + std::to_string(static_cast<long long>(count)) +
                          " words exceed the limit " + std::to_string(opt.max_words));
    const std::vector<Word> words = enumerate_words(factors, 0, opt.degree);

    const MomentEngine engine(s, gens);
    const Index domain = opt.domain_cols > 0 ? std::min(opt.domain_cols, s.dim()) : s.dim();
    const ComplexMatrix frame = ComplexMatrix::Identity(s.dim(), domain);

    std::vector<ComplexMatrix> ops;
    std::vector<ComplexMatrix> vecs;
    for (const auto& w : words) {
        ops.push_back(engine.apply(w, frame));
        vecs.push_back(engine.apply(w, engine.state_block()));
    }
    const auto m = static_cast<Index>(words.size());
    ComplexMatrix hs(m, m);
    ComplexMatrix gns(m, m);
    for (Index a = 0; a < m; ++a)
        for (Index b = 0; b < m; ++b) {
            hs(a, b) = MomentEngine::pairing(ops[a], ops[b]);
            gns(a, b) = MomentEngine::pairing(vecs[a], vecs[b]);
        }

    FaithfulnessReport rep;
    rep.words = static_cast<int>(m);
    rep.span_dim = psd_rank(hs, opt.rank_tol);
    rep.gram_rank = psd_rank(gns, opt.rank_tol);
    rep.faithful_on_span = rep.span_dim == rep.gram_rank;
    return rep;
}

// ---------------------------------------------------------------------------

TensorModel make_tensor_independent(std::span<const std::pair<ComplexMatrix, State>> factors)
{
    if (factors.empty())
        throw DimensionError("make_tensor_independent: no factors");
    Index total = 1;
    for (const auto& [t, st] : factors) {
        if (t.rows() != t.cols() || t.rows() != st.dim())
            throw DimensionError("make_tensor_independent: operator " + shape_of(t) + " with a state of dimension " +
                                 std::to_string(st.dim()));
        total *= t.rows();
        if (total > kMaxTensorDim)
            throw BudgetError("make_tensor_independent: product dimension exceeds " + std::to_string(kMaxTensorDim));
    }

    std::vector<ComplexMatrix> gens;
    Index before = 1;
    for (const auto& [t, st] : factors) {
        const Index after = total / (before * t.rows());
        gens.push_back(
            kron(ComplexMatrix::Identity(before, before), kron(t, ComplexMatrix::Identity(after, after))));
        before *= t.rows();
    }

    const bool all_vectors =
        std::all_of(factors.begin(), factors.end(), [](const auto& f) { return f.second.is_vector(); });
    if (all_vectors) {
        ComplexMatrix xi = ComplexMatrix::Ones(1, 1);
        for (const auto& f : factors)
            xi = kron(xi, f.second.vector());
        return {std::move(gens), State::from_vector(xi.col(0))};
    }
    ComplexMatrix rho = ComplexMatrix::Ones(1, 1);
    for (const auto& f : factors)
        rho = kron(rho, f.second.as_density());
    return {std::move(gens), State::from_density(std::move(rho))};
}

} // namespace freedil
