#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "simulst/core/session.hpp"
#include "simulst/policies/policy.hpp"
#include "test_support.hpp"

using namespace simulst;
using namespace testing_support;

namespace {

Tokens random_tokens(std::mt19937_64 &rng, std::size_t max_len) {
    std::uniform_int_distribution<std::size_t> len(0, max_len);
    std::uniform_int_distribution<int> sym(0, 2);
    Tokens out(len(rng));
    for (auto &t : out)
        t = std::string(1, static_cast<char>('a' + sym(rng)));
    return out;
}

} // namespace

TEST(LocalAgreement, WaitsForNHypotheses) {
    const auto cfg = PolicyConfig::local_agreement(3);
    PolicyState s;
    auto step = la_step(cfg, s, {{"a", "b"}, 1});
    EXPECT_TRUE(step.tokens_to_commit.empty());
    step = la_step(cfg, step.state, {{"a", "b"}, 2});
    EXPECT_TRUE(step.tokens_to_commit.empty());
    step = la_step(cfg, step.state, {{"a", "b", "c"}, 3});
    EXPECT_EQ(step.tokens_to_commit, (Tokens{"a", "b"}));
    EXPECT_EQ(step.state.history.size(), 3u);
}

TEST(LocalAgreement, CommitsOnlyNewAgreedTokens) {
    const auto cfg = PolicyConfig::local_agreement(2);
    PolicyState s;
    auto step = la_step(cfg, s, {{"a"}, 1});
    step = la_step(cfg, step.state, {{"a", "b"}, 2});
    EXPECT_EQ(step.tokens_to_commit, (Tokens{"a"}));
    step = la_step(cfg, step.state, {{"a", "b", "c"}, 3});
    EXPECT_EQ(step.tokens_to_commit, (Tokens{"b"}));
    EXPECT_EQ(step.state.committed, (Tokens{"a", "b"}));
}

TEST(LocalAgreement, ConflictSetsFlagAndCommitsNothing) {
    const auto cfg = PolicyConfig::local_agreement(2);
    PolicyState s;
    s.committed = {"a", "b"};
    auto step = la_step(cfg, s, {{"a", "x", "y"}, 3});
    EXPECT_TRUE(step.state.prefix_conflict);
    step = la_step(cfg, step.state, {{"a", "x", "y", "z"}, 4});
    EXPECT_TRUE(step.state.prefix_conflict);
    EXPECT_TRUE(step.tokens_to_commit.empty());
    EXPECT_EQ(step.state.committed, (Tokens{"a", "b"}));
    EXPECT_EQ(step.state.conflict_count, 2u);
    step = la_step(cfg, step.state, {{"a", "b", "c"}, 5});
    EXPECT_FALSE(step.state.prefix_conflict);
}

TEST(LocalAgreement, MatchesBruteForceLcpOnRandomHistories) {
    std::mt19937_64 rng(1234);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t n = 2 + trial % 3;
        const auto cfg = PolicyConfig::local_agreement(n);
        PolicyState state;
        std::vector<Tokens> hyps;
        for (int step_no = 0; step_no < 8; ++step_no) {
            hyps.push_back(random_tokens(rng, 6));
            const Tokens before = state.committed;
            auto step = la_step(cfg, state, {hyps.back(), hyps.size()});
            state = step.state;
            // committed never shrinks or changes
            ASSERT_TRUE(is_prefix_of(before, state.committed));
            if (hyps.size() < n) {
                ASSERT_TRUE(step.tokens_to_commit.empty());
                continue;
            }
            const std::vector<Tokens> window(hyps.end() - static_cast<std::ptrdiff_t>(n), hyps.end());
            const auto agreed = oracle::lcp(window);
            if (is_prefix_of(before, hyps.back()) && agreed > before.size())
                ASSERT_EQ(state.committed, Tokens(hyps.back().begin(), hyps.back().begin() + agreed));
            else
                ASSERT_EQ(state.committed, before);
        }
    }
}

TEST(WaitK, NothingBeforeKThenOnePerStep) {
    const auto cfg = PolicyConfig::wait_k(3);
    PolicyState s;
    const Tokens hyp{"a", "b", "c", "d", "e"};
    std::vector<std::size_t> committed_sizes;
    for (std::size_t read = 1; read <= 5; ++read) {
        s = wait_k_step(cfg, s, read, {hyp, read}).state;
        committed_sizes.push_back(s.committed.size());
    }
    EXPECT_EQ(committed_sizes, (std::vector<std::size_t>{0, 0, 1, 2, 3}));
}

TEST(WaitK, StallsWhenHypothesisIsShortOrConflicting) {
    const auto cfg = PolicyConfig::wait_k(1);
    PolicyState s;
    s.committed = {"a"};
    EXPECT_TRUE(wait_k_step(cfg, s, 2, {{"a"}, 2}).tokens_to_commit.empty());
    const auto step = wait_k_step(cfg, s, 2, {{"b", "c"}, 2});
    EXPECT_TRUE(step.tokens_to_commit.empty());
    EXPECT_TRUE(step.state.prefix_conflict);
}

TEST(Flush, CommitsRemainderOrNothingOnConflict) {
    PolicyState s;
    s.committed = {"a"};
    auto step = flush_step(s, {{"a", "b", "c"}, 3});
    EXPECT_EQ(step.tokens_to_commit, (Tokens{"b", "c"}));
    step = flush_step(s, {{"x", "b"}, 3});
    EXPECT_TRUE(step.tokens_to_commit.empty());
    EXPECT_EQ(step.state.committed, Tokens{"a"});
    step = flush_step(s, {{}, 3});
    EXPECT_TRUE(step.tokens_to_commit.empty());
}

TEST(PolicyConfig, ParsesAndValidates) {
    EXPECT_EQ(parse_policy_kind("la"), PolicyKind::kLocalAgreement);
    EXPECT_EQ(parse_policy_kind("wait-k"), PolicyKind::kWaitK);
    EXPECT_THROW(parse_policy_kind("greedy"), ConfigError);
    EXPECT_THROW(PolicyConfig::local_agreement(1).validate(), ConfigError);
    EXPECT_THROW(PolicyConfig::wait_k(0).validate(), ConfigError);
    auto cfg = PolicyConfig::wait_k(2);
    cfg.max_output_tokens = 0;
    EXPECT_THROW(cfg.validate(), ConfigError);
}

// Invariants over random sessions with the toy agent: append-only output, at most one flush, Write
// times never exceed the source end, and wait-k never writes before k segments.
TEST(PolicyInvariants, RandomSessions) {
    std::mt19937_64 rng(99);
    const auto lex = random_lexicon(rng, 25);
    for (int i = 0; i < 300; ++i) {
        const auto utt = random_utterance(rng, 25, "p" + std::to_string(i));
        const auto policy = i % 2 ? PolicyConfig::wait_k(1 + i % 4) : PolicyConfig::local_agreement(2 + i % 3);
        const auto style = i % 3 == 0 ? StyleTagChoice::si() : StyleTagChoice::offline();
        ToyAgent agent(lex);
        const auto log = run_session(utt, policy, agent, style);
        ASSERT_EQ(check_log_invariants(log, utt), "") << utt.id;
        const auto steps = committed_after_reads(log);
        for (std::size_t s = 1; s < steps.size(); ++s)
            ASSERT_TRUE(is_prefix_of(steps[s - 1], steps[s]));
        if (policy.kind == PolicyKind::kWaitK)
            for (std::size_t s = 0; s + 1 < steps.size() && s + 1 < policy.k; ++s)
                ASSERT_TRUE(steps[s].empty()) << utt.id;
        // the toy always continues the committed output, so the flush delivers exactly the words of
        // the full translation (possibly in a different order)
        ASSERT_EQ(log.prefix_conflicts, 0u);
        auto full = toy_translate(lex, utt.source_prefix(utt.segments.size()),
                                  style.tag == StyleTag::kSI ? ToyStyle::kSI : ToyStyle::kOffline);
        auto out = log.committed();
        std::sort(full.begin(), full.end());
        std::sort(out.begin(), out.end());
        ASSERT_EQ(out, full) << utt.id;
    }
}
