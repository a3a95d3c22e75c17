// Acceptance checks: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "oracles.hpp"
#include "simulst/simulst.hpp"
#include "test_support.hpp"

using namespace simulst;
using namespace testing_support;

namespace {

namespace fs = std::filesystem;

// Collects violations for one criterion; the first few are printed with the verdict.
struct Check {
    std::vector<std::string> failures;
    std::string detail;

    void require(bool ok, const std::string &what) {
        if (!ok)
            failures.push_back(what);
    }
};

int report(const std::string &name, const Check &c) {
    std::printf("%s %s", c.failures.empty() ? "PASS" : "FAIL", name.c_str());
    if (!c.detail.empty())
        std::printf(" (%s)", c.detail.c_str());
    std::printf("\n");
    for (std::size_t i = 0; i < c.failures.size() && i < 5; ++i)
        std::fprintf(stderr, "  [FAIL] %s\n", c.failures[i].c_str());
    if (c.failures.size() > 5)
        std::fprintf(stderr, "  ... %zu more\n", c.failures.size() - 5);
    std::fflush(stdout);
    return c.failures.empty() ? 0 : 1;
}

int guarded(const std::string &name, const std::function<Check()> &body) {
    try {
        return report(name, body());
    } catch (const std::exception &e) {
        Check c;
        c.require(false, std::string("exception: ") + e.what());
        return report(name, c);
    }
}

// Passes requests through and keeps every returned hypothesis (tag stripped) for replay.
class RecordingAgent : public Agent {
  public:
    explicit RecordingAgent(Agent &inner) : inner_(inner) {}

    Tokens hypothesize(const AgentRequest &request) override {
        auto out = inner_.hypothesize(request);
        hypotheses.push_back(strip_forced_prefix(out, request.forced_prefix));
        return out;
    }

    void reset() override {
        inner_.reset();
        hypotheses.clear();
    }

    std::vector<Tokens> hypotheses;

  private:
    Agent &inner_;
};

std::string label(const std::string &id, std::size_t step) { return id + " step " + std::to_string(step); }

Check policy_invariants() {
    Check c;
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(2024);
    std::size_t la_sessions = 0;
    std::size_t wk_sessions = 0;
    std::size_t first_writes = 0;
    for (int s = 0; s < 1000; ++s) {
        const auto lex = random_lexicon(rng, 12);
        const auto utt = random_utterance(rng, 12, "s" + std::to_string(s));
        const bool la = s % 2 == 0;
        const std::size_t k = 1 + static_cast<std::size_t>(s / 2) % 4;
        const auto policy = la ? PolicyConfig::local_agreement(2) : PolicyConfig::wait_k(k);
        const auto style = (s / 4) % 2 == 0 ? StyleTagChoice::si() : StyleTagChoice::offline();

        ToyAgent toy(lex);
        RecordingAgent agent(toy);
        const auto log = run_session(utt, policy, agent, style);
        const auto &hyp = agent.hypotheses;
        const auto after = committed_after_reads(log);
        const std::size_t n = utt.segments.size();
        c.require(log.finished && hyp.size() == n && after.size() == n, utt.id + ": incomplete session");
        if (after.size() != n || hyp.size() != n)
            continue;

        // Append-only: every committed state extends the previous one.
        for (std::size_t i = 1; i < n; ++i)
            c.require(oracle::lcp({after[i - 1], after[i]}) == after[i - 1].size(), label(utt.id, i) + ": retraction");

        // Replay the policy decisions against the recorded hypotheses with the brute-force lcp.
        Tokens committed;
        std::size_t first_write_read = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto &h = hyp[i];
            const bool extends = oracle::lcp({committed, h}) == committed.size();
            Tokens expected = committed;
            if (i + 1 == n) {
                if (extends)
                    expected = h;
            } else if (la) {
                if (i >= 1) {
                    const auto agreed = oracle::lcp({hyp[i - 1], h});
                    if (extends && agreed > committed.size())
                        expected.assign(h.begin(), h.begin() + static_cast<std::ptrdiff_t>(agreed));
                }
            } else if (i + 1 >= k && extends && h.size() > committed.size()) {
                expected.push_back(h[committed.size()]);
            }
            c.require(after[i] == expected, label(utt.id, i) + ": committed output differs from oracle replay");
            if (first_write_read == 0 && !after[i].empty())
                first_write_read = i + 1;
            committed = after[i];
        }

        if (la) {
            ++la_sessions;
        } else {
            ++wk_sessions;
            // No write before k reads (the end-of-source flush aside); a non-empty hypothesis at read
            // k is written at read k.
            if (first_write_read != 0 && first_write_read < n)
                c.require(first_write_read >= k, utt.id + ": wait-" + std::to_string(k) + " wrote at read " +
                                                     std::to_string(first_write_read));
            if (k < n && !hyp[k - 1].empty()) {
                ++first_writes;
                c.require(first_write_read == k, utt.id + ": wait-" + std::to_string(k) + " first write at read " +
                                                     std::to_string(first_write_read));
            }
        }
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    c.require(secs < 10.0, "runtime " + std::to_string(secs) + " s");
    std::ostringstream d;
    d << la_sessions << " LA-2 + " << wk_sessions << " wait-k sessions, " << first_writes
      << " first writes checked, " << c.failures.size() << " violations, " << secs << " s";
    c.detail = d.str();
    return c;
}

SessionLog make_log(const std::vector<std::tuple<Millis, std::size_t, std::size_t>> &steps) {
    SessionLog log;
    Millis t = 0;
    std::size_t w = 0;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        const auto [dur, ntok, nwrite] = steps[i];
        t += dur;
        log.events.emplace_back(ReadEvent{i, t, ntok});
        for (std::size_t j = 0; j < nwrite; ++j)
            log.events.emplace_back(WriteEvent{"y" + std::to_string(w++), t});
    }
    log.source_total_ms = t;
    log.finished = true;
    return log;
}

Check metric_oracles() {
    Check c;
    // AL of ideal wait-k on a 1:1 unit clock.
    for (std::size_t k = 1; k <= 5; ++k) {
        std::vector<Tokens> payloads;
        for (std::size_t i = 0; i < 10; ++i)
            payloads.push_back({"x" + std::to_string(i)});
        EchoAgent agent;
        const auto log =
            run_session(make_utterance("wk", payloads, 1), PolicyConfig::wait_k(k), agent, StyleTagChoice::none());
        const auto al = metrics::average_lagging(log);
        c.require(al && *al == static_cast<double>(k), "AL of ideal wait-" + std::to_string(k));
    }

    // ATD hand-computed cases.
    struct AtdCase {
        std::vector<std::tuple<Millis, std::size_t, std::size_t>> steps;
        double expected;
        const char *name;
    };
    const std::vector<AtdCase> atd_cases{
        {{{200, 1, 0}, {200, 1, 2}}, 100.0, "two 200 ms segments, both outputs at 400 ms"},
        {{{200, 1, 1}, {150, 1, 1}, {300, 1, 1}}, 0.0, "1:1 emission at segment ends"},
        {{{200, 2, 2}}, 50.0, "two tokens sharing one segment"},
        {{{100, 1, 0}, {100, 1, 0}, {100, 1, 0}, {100, 1, 8}}, 75.0, "output twice the input length"},
        {{{100, 0, 1}, {100, 1, 0}}, 100.0, "write before any source token"},
    };
    for (const auto &tc : atd_cases) {
        const auto atd = metrics::average_token_delay(make_log(tc.steps));
        c.require(atd && std::abs(*atd - tc.expected) <= 1e-9, std::string("ATD: ") + tc.name);
    }

    // BLEU against exhaustive n-gram counting: every hypothesis/reference pair of up to 5 tokens over
    // {a, b, c}, as single-sentence corpora, plus random multi-sentence corpora from the same pool.
    const Tokens alphabet{"a", "b", "c"};
    std::vector<Tokens> pool;
    for (std::size_t len = 0; len <= 5; ++len) {
        const auto grams = oracle::all_ngrams(alphabet, len);
        pool.insert(pool.end(), grams.begin(), grams.end());
    }
    std::size_t corpora = 0;
    double worst = 0.0;
    for (const auto &h : pool) {
        for (const auto &r : pool) {
            const double got = metrics::corpus_bleu({h}, {r});
            const double want = oracle::bleu({h}, {r}, alphabet);
            worst = std::max(worst, std::abs(got - want));
            ++corpora;
        }
    }
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    for (int i = 0; i < 3000; ++i) {
        std::vector<Tokens> hs(1 + i % 4);
        std::vector<Tokens> rs(hs.size());
        for (std::size_t s = 0; s < hs.size(); ++s) {
            hs[s] = pool[pick(rng)];
            rs[s] = pool[pick(rng)];
        }
        worst = std::max(worst, std::abs(metrics::corpus_bleu(hs, rs) - oracle::bleu(hs, rs, alphabet)));
        ++corpora;
    }
    c.require(worst <= 1e-6, "BLEU deviates from the counting oracle by " + std::to_string(worst));
    c.detail = "AL k=1..5 exact, " + std::to_string(atd_cases.size()) + " ATD cases, " + std::to_string(corpora) +
               " BLEU corpora, max BLEU error " + std::to_string(worst);
    return c;
}

eval::RunConfig toy_config(const std::string &corpus, StyleTag style, PolicyConfig policy) {
    eval::RunConfig c;
    c.corpus_path = fixture(corpus);
    c.agent.kind = AgentKind::kBuiltinToy;
    c.agent.lexicon_path = fixture("lexicon.json");
    c.policy = policy;
    c.style = style;
    return c;
}

Check style_tag_contract() {
    Check c;
    const std::vector<PolicyConfig> policies{PolicyConfig::local_agreement(2), PolicyConfig::local_agreement(3),
                                             PolicyConfig::local_agreement(4), PolicyConfig::wait_k(1),
                                             PolicyConfig::wait_k(3), PolicyConfig::wait_k(5)};
    const auto tag_forms = [] {
        Tokens all = textproc::si_tag().token_forms;
        const auto off = textproc::off_tag().token_forms;
        all.insert(all.end(), off.begin(), off.end());
        return all;
    }();
    std::size_t tokens_checked = 0;
    for (const auto &policy : policies) {
        for (const auto style : {StyleTag::kSI, StyleTag::kOffline}) {
            auto config = toy_config("reorder_corpus.jsonl", style, policy);
            config.segment_sizes_ms = {120, 200, 400, 600, 800, 1000};
            for (const auto &size : eval::evaluate(config).sizes) {
                for (const auto &s : size.sentences) {
                    for (const auto &tok : s.log.committed()) {
                        ++tokens_checked;
                        c.require(std::find(tag_forms.begin(), tag_forms.end(), tok) == tag_forms.end(),
                                  config.system_label() + " " + s.id + ": emitted tag token '" + tok + "'");
                    }
                    const auto text = textproc::detokenize(s.hypothesis);
                    for (const auto *surface : {"<si>", "<off>"})
                        c.require(text.find(surface) == std::string::npos,
                                  config.system_label() + " " + s.id + ": tag surface in output");
                }
            }
        }
    }

    const auto si = eval::evaluate(toy_config("reorder_corpus.jsonl", StyleTag::kSI, PolicyConfig::local_agreement(2)));
    const auto off =
        eval::evaluate(toy_config("reorder_corpus.jsonl", StyleTag::kOffline, PolicyConfig::local_agreement(2)));
    std::ostringstream d;
    d << tokens_checked << " emitted tokens tag-free; ATD si/off:";
    for (std::size_t i = 0; i < si.sizes.size(); ++i) {
        const double a = *si.sizes[i].report.atd_ms;
        const double b = *off.sizes[i].report.atd_ms;
        d << ' ' << si.sizes[i].segment_ms << "ms " << static_cast<long>(a) << '/' << static_cast<long>(b);
        c.require(a < b, "ATD(si) >= ATD(off) at " + std::to_string(si.sizes[i].segment_ms) + " ms");
    }
    c.detail = d.str();
    return c;
}

Check repetition_removal() {
    using namespace textproc;
    Check c;
    c.require(remove_bracketed_tokens({"(拍手)", "(拍手)", "こんにちは"}) == Tokens{"こんにちは"}, "bracket example 1");
    c.require(remove_bracketed_tokens({"拍手)", "皆さん"}) == Tokens{"皆さん"}, "bracket example 2");
    c.require(remove_bracketed_tokens({"こんにちは"}) == Tokens{"こんにちは"}, "bracket example 3");
    c.require(stop_on_repeated_trigram({"a", "b", "c", "d"}) == Tokens{"a", "b", "c", "d"}, "trigram example 1");
    c.require(stop_on_repeated_trigram(Tokens(5, "x")) == Tokens(4, "x"), "trigram example 2");
    c.require(prepend_tag("私は、買った。ペンを、", si_tag()) == "<si>私は、買った。ペンを、", "tag example 1");
    c.require(prepend_tag("hello", off_tag()) == "<off>hello", "tag example 2");

    auto config = toy_config("applause_corpus.jsonl", StyleTag::kSI, PolicyConfig::local_agreement(2));
    const auto before = eval::evaluate(config);
    config.rmrep = {true, true};
    const auto after = eval::evaluate(config);
    std::ostringstream d;
    d << "BLEU/length ratio before -> after:";
    for (std::size_t i = 0; i < before.sizes.size(); ++i) {
        const auto &b = before.sizes[i].report;
        const auto &a = after.sizes[i].report;
        d << ' ' << b.segment_ms << "ms " << b.bleu << "->" << a.bleu << ", " << b.length_ratio << "->"
          << a.length_ratio << ';';
        c.require(a.bleu >= b.bleu, "BLEU dropped at " + std::to_string(b.segment_ms) + " ms");
        c.require(a.length_ratio < b.length_ratio, "length ratio did not decrease at " +
                                                       std::to_string(b.segment_ms) + " ms");
    }
    c.detail = d.str();
    return c;
}

Check mixture_arithmetic() {
    using namespace dataprep;
    Check c;
    const std::size_t n_off = 328639;
    const std::size_t n_si = 65008;
    std::vector<CorpusExample> examples;
    examples.reserve(n_off + n_si);
    for (std::size_t i = 0; i < n_off + n_si; ++i) {
        CorpusExample ex;
        ex.id = std::to_string(i);
        ex.origin = i < n_off ? Origin::kOffline : Origin::kSI;
        ex.source = {"s" + std::to_string(i)};
        ex.target = "t" + std::to_string(i);
        ex.source_times = {0.0};
        examples.push_back(std::move(ex));
    }
    MixtureConfig cfg;
    cfg.condition = Condition::kMixedFTStyleUp;
    cfg.upsample_factor = balanced_upsample_factor(n_off, n_si);
    cfg.seed = 1;
    const auto mix = build_mixture(examples, cfg);
    std::size_t si_lines = 0;
    std::size_t off_lines = 0;
    for (const auto &line : mix.lines) {
        const auto target = line.substr(line.find('\t') + 1);
        si_lines += target.rfind("<si>", 0) == 0 ? 1 : 0;
        off_lines += target.rfind("<off>", 0) == 0 ? 1 : 0;
    }
    c.require(cfg.upsample_factor == 5, "upsample factor " + std::to_string(cfg.upsample_factor));
    c.require(mix.lines.size() == n_off + 5 * n_si, "total lines " + std::to_string(mix.lines.size()));
    c.require(off_lines == n_off, "offline lines " + std::to_string(off_lines));
    c.require(si_lines == 5 * n_si, "SI lines " + std::to_string(si_lines));
    c.detail = std::to_string(off_lines) + " + 5 x " + std::to_string(n_si) + " = " + std::to_string(mix.lines.size()) +
               " lines";
    return c;
}

Check pa_extraction() {
    Check c;
    std::size_t chains = 0;
    std::size_t pairs_checked = 0;
    const auto check_chain = [&](const ToyLexicon &lex, const TimedUtterance &utt) {
        ToyAgent agent(lex, ToyStyle::kSI);
        const auto pairs = dataprep::extract_prefix_pairs(utt, agent, StyleTagChoice::si());
        const auto full = toy_translate(lex, utt.source_prefix(utt.segments.size()), ToyStyle::kSI);
        std::size_t prev = 0;
        for (const auto &p : pairs) {
            ++pairs_checked;
            c.require(p.target_prefix.size() > prev, utt.id + ": chain does not grow at segment " +
                                                         std::to_string(p.segments));
            const auto t_i = toy_translate(lex, p.source_prefix, ToyStyle::kSI);
            c.require(p.target_prefix.size() == oracle::lcp({t_i, full}) &&
                          oracle::lcp({p.target_prefix, full}) == p.target_prefix.size(),
                      utt.id + ": pair at segment " + std::to_string(p.segments) + " is not lcp(t_i, t_K)");
            prev = p.target_prefix.size();
        }
        if (!full.empty())
            c.require(!pairs.empty() && pairs.back().target_prefix == full,
                      utt.id + ": chain does not end in the full translation");
        ++chains;
    };
    const auto lex = load_lexicon(fixture("lexicon.json"));
    for (const auto &utt : read_corpus_file(fixture("reorder_corpus.jsonl")))
        check_chain(lex, utt);
    std::mt19937_64 rng(99);
    for (int i = 0; i < 500; ++i) {
        const auto random_lex = random_lexicon(rng, 15);
        check_chain(random_lex, random_utterance(rng, 15, "pa" + std::to_string(i)));
    }
    c.detail = std::to_string(chains) + " chains, " + std::to_string(pairs_checked) + " pairs, " +
               std::to_string(c.failures.size()) + " violations";
    return c;
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Check determinism() {
    Check c;
    const auto root = fs::temp_directory_path() / ("simulst_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    auto config = eval::load_run_config(fixture("run_config.json"));
    config.jobs = 3;
    for (const auto *run : {"a", "b"})
        eval::write_outputs(eval::evaluate(config), (root / run).string());
    std::size_t files = 0;
    for (const auto &entry : fs::directory_iterator(root / "a")) {
        const auto name = entry.path().filename();
        ++files;
        c.require(fs::exists(root / "b" / name) && slurp(entry.path()) == slurp(root / "b" / name),
                  name.string() + " differs between runs");
    }
    c.require(files >= 7, "only " + std::to_string(files) + " files written");
    fs::remove_all(root);
    c.detail = std::to_string(files) + " files byte-identical across two runs";
    return c;
}

} // namespace

int main() {
    int failed = 0;
    failed += guarded("policy invariants", policy_invariants);
    failed += guarded("metric oracles", metric_oracles);
    failed += guarded("style-tag contract", style_tag_contract);
    failed += guarded("repetition removal", repetition_removal);
    failed += guarded("mixture arithmetic", mixture_arithmetic);
    failed += guarded("prefix alignment extraction", pa_extraction);
    failed += guarded("determinism", determinism);
    std::printf("%d of 7 criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
