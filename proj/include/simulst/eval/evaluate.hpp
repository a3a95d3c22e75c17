#pragma once

#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "simulst/agents/handle.hpp"
#include "simulst/core/corpus_io.hpp"
#include "simulst/core/error.hpp"
#include "simulst/core/session.hpp"
#include "simulst/core/session_io.hpp"
#include "simulst/eval/run_config.hpp"
#include "simulst/metrics/bleu.hpp"
#include "simulst/metrics/latency.hpp"
#include "simulst/metrics/length.hpp"
#include "simulst/metrics/report.hpp"
#include "simulst/textproc/rmrep.hpp"
#include "simulst/textproc/tokenize.hpp"

namespace simulst::eval {

// Regroups an utterance into fixed chunks of `segment_ms`. Each source token is placed in time at
// its end (segment durations evenly subdivided over the segment's tokens) and lands in the chunk
// containing that end time, chunk c covering (c*size, (c+1)*size]. The last chunk is shortened to
// the utterance duration; chunks may carry no tokens.
inline TimedUtterance resegment(const TimedUtterance &utt, Millis segment_ms) {
    if (segment_ms <= 0)
        throw ConfigError("segment size must be positive");
    validate(utt);
    const Millis total = utt.total_duration_ms();
    const auto chunks = static_cast<std::size_t>((total + segment_ms - 1) / segment_ms);

    TimedUtterance out;
    out.id = utt.id;
    out.ref_si = utt.ref_si;
    out.ref_off = utt.ref_off;
    for (std::size_t c = 0; c < chunks; ++c) {
        const Millis end = std::min<Millis>(static_cast<Millis>(c + 1) * segment_ms, total);
        out.segments.push_back({c, end - static_cast<Millis>(c) * segment_ms, {}});
    }
    Millis start = 0;
    for (const auto &seg : utt.segments) {
        const auto m = static_cast<Millis>(seg.payload.size());
        for (Millis t = 1; t <= m; ++t) {
            // Token end time is (start*m + t*duration) / m; chunk = ceil(end / size) - 1, in integers.
            const Millis num = start * m + t * seg.duration_ms;
            const Millis den = m * segment_ms;
            const auto c = static_cast<std::size_t>(std::max<Millis>((num + den - 1) / den - 1, 0));
            out.segments[std::min(c, chunks - 1)].payload.push_back(seg.payload[static_cast<std::size_t>(t - 1)]);
        }
        start += seg.duration_ms;
    }
    return out;
}

// Drops Write events whose committed token is removed by repetition removal.
inline SessionLog apply_rmrep(const SessionLog &log, textproc::RmrepFlags flags) {
    if (!flags.any())
        return log;
    const auto keep = textproc::rmrep_mask(log.committed(), flags);
    SessionLog out;
    out.source_total_ms = log.source_total_ms;
    out.finished = log.finished;
    out.prefix_conflicts = log.prefix_conflicts;
    std::size_t w = 0;
    for (const auto &ev : log.events) {
        if (std::holds_alternative<WriteEvent>(ev)) {
            if (keep[w++])
                out.events.push_back(ev);
        } else {
            out.events.push_back(ev);
        }
    }
    return out;
}

struct SentenceResult {
    std::string id;
    SessionLog log;        // after repetition removal
    Tokens hypothesis;     // committed tokens after repetition removal
    Tokens reference;
    metrics::SentenceLatency latency;
};

struct SizeResult {
    Millis segment_ms = 0;
    metrics::MetricReport report;
    metrics::LatencyReport latency;
    metrics::LengthHistogram histogram;
    std::vector<SentenceResult> sentences;
};

struct EvaluationResult {
    std::string system;
    std::vector<SizeResult> sizes;

    std::vector<metrics::MetricReport> reports() const {
        std::vector<metrics::MetricReport> out;
        for (const auto &s : sizes)
            out.push_back(s.report);
        return out;
    }
};

using AgentFactory = std::function<std::unique_ptr<Agent>()>;

inline const Tokens &reference_for(const TimedUtterance &utt, StyleTag which) {
    const auto &ref = which == StyleTag::kSI ? utt.ref_si : utt.ref_off;
    if (!ref || ref->empty())
        throw DataError("utterance '" + utt.id + "' has no " + std::string(to_string(which)) + " reference");
    return *ref;
}

inline SentenceResult evaluate_utterance(const TimedUtterance &utt, const RunConfig &config, Agent &agent) {
    SentenceResult r;
    r.id = utt.id;
    r.reference = reference_for(utt, config.reference_style());
    r.log = apply_rmrep(run_session(utt, config.policy, agent, config.style_choice()), config.rmrep);
    r.hypothesis = r.log.committed();
    const std::optional<std::size_t> ref_len =
        config.al_reference_length ? std::optional<std::size_t>(r.reference.size()) : std::nullopt;
    r.latency.id = utt.id;
    r.latency.al_ms = metrics::average_lagging(r.log, ref_len);
    r.latency.al_tokens = metrics::average_lagging_tokens(r.log, ref_len);
    r.latency.atd_ms = metrics::average_token_delay(r.log);
    return r;
}

// Aggregates sentence results of one segment size into its report.
inline SizeResult summarize(const std::string &system, Millis segment_ms, std::vector<SentenceResult> sentences) {
    SizeResult s;
    s.segment_ms = segment_ms;
    std::vector<metrics::SentenceLatency> lat;
    std::vector<Tokens> hyp_tok;
    std::vector<Tokens> ref_tok;
    std::vector<std::string> hyp_txt;
    std::vector<std::string> ref_txt;
    for (const auto &r : sentences) {
        lat.push_back(r.latency);
        hyp_txt.push_back(textproc::detokenize(r.hypothesis));
        ref_txt.push_back(textproc::detokenize(r.reference));
        // BLEU on one consistent tokenization of both sides.
        hyp_tok.push_back(textproc::tokenize(hyp_txt.back()));
        ref_tok.push_back(textproc::tokenize(ref_txt.back()));
    }
    s.latency = metrics::summarize_latency(std::move(lat));
    s.histogram = metrics::length_difference_histogram(hyp_txt, ref_txt);
    s.report.system = system;
    s.report.segment_ms = segment_ms;
    s.report.al_ms = s.latency.al_ms;
    s.report.atd_ms = s.latency.atd_ms;
    s.report.bleu = metrics::corpus_bleu(hyp_tok, ref_tok);
    s.report.length_ratio = metrics::length_ratio(hyp_txt, ref_txt);
    s.sentences = std::move(sentences);
    return s;
}

// Sweeps the configured segment sizes over an in-memory corpus. Sessions run on up to config.jobs
// workers, each with its own agent; results keep corpus order.
inline EvaluationResult evaluate(const std::vector<TimedUtterance> &corpus, const RunConfig &config,
                                 const AgentFactory &make_agent) {
    if (config.segment_sizes_ms.empty())
        throw ConfigError("segment_sizes_ms must not be empty");
    if (corpus.empty())
        throw DataError("corpus is empty");
    for (const auto &utt : corpus)
        reference_for(utt, config.reference_style());

    EvaluationResult result;
    result.system = config.system_label();
    for (const Millis size : config.segment_sizes_ms) {
        std::vector<SentenceResult> sentences(corpus.size());
        std::atomic<std::size_t> next{0};
        std::mutex error_mutex;
        std::exception_ptr error;
        const auto worker = [&] {
            try {
                auto agent = make_agent();
                for (std::size_t u = next++; u < corpus.size(); u = next++) {
                    {
                        std::lock_guard lock(error_mutex);
                        if (error)
                            return;
                    }
                    sentences[u] = evaluate_utterance(resegment(corpus[u], size), config, *agent);
                }
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
            }
        };
        const std::size_t jobs = std::min(config.jobs, corpus.size());
        if (jobs <= 1) {
            worker();
        } else {
            std::vector<std::jthread> pool;
            for (std::size_t j = 0; j < jobs; ++j)
                pool.emplace_back(worker);
        }
        if (error)
            std::rethrow_exception(error);
        result.sizes.push_back(summarize(result.system, size, std::move(sentences)));
    }
    return result;
}

inline EvaluationResult evaluate(const RunConfig &config) {
    config.validate();
    const auto corpus = read_corpus_file(config.corpus_path);
    return evaluate(corpus, config, [&] { return make_agent(config.agent); });
}

// Writes the run's data files into `dir`:
//   report.csv / report.jsonl   one record per segment size
//   sentences.jsonl             per-sentence latency, hypothesis and session log
//   histogram.csv               length-difference buckets per segment size
//   hyp_<ms>.txt, ref.txt       detokenized text, one sentence per line
inline void write_outputs(const EvaluationResult &result, const std::string &dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
    const auto open = [&](const std::string &name) {
        std::ofstream out(fs::path(dir) / name, std::ios::binary);
        if (!out)
            throw ConfigError("cannot write '" + (fs::path(dir) / name).string() + "'");
        return out;
    };
    const auto reports = result.reports();
    {
        auto out = open("report.csv");
        metrics::write_reports_csv(out, reports);
    }
    {
        auto out = open("report.jsonl");
        metrics::write_reports_jsonl(out, reports);
    }
    {
        auto out = open("sentences.jsonl");
        for (const auto &s : result.sizes) {
            for (const auto &r : s.sentences) {
                const auto opt = [](const std::optional<double> &v) {
                    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
                };
                nlohmann::json j{{"system", result.system},
                                 {"segment_ms", s.segment_ms},
                                 {"id", r.id},
                                 {"al_ms", opt(r.latency.al_ms)},
                                 {"al_tokens", opt(r.latency.al_tokens)},
                                 {"atd_ms", opt(r.latency.atd_ms)},
                                 {"hypothesis", r.hypothesis},
                                 {"log", session_log_to_json(r.log)}};
                out << j.dump() << '\n';
            }
        }
    }
    {
        auto out = open("histogram.csv");
        out << "system,segment_ms,bucket_lower,bucket_upper,count\n";
        for (const auto &s : result.sizes)
            for (std::size_t i = 0; i < s.histogram.counts.size(); ++i)
                out << metrics::detail::csv_escape(result.system) << ',' << s.segment_ms << ','
                    << s.histogram.bucket_lower(i) << ',' << s.histogram.bucket_lower(i) + s.histogram.width << ','
                    << s.histogram.counts[i] << '\n';
    }
    for (const auto &s : result.sizes) {
        auto out = open("hyp_" + std::to_string(s.segment_ms) + ".txt");
        for (const auto &r : s.sentences)
            out << textproc::detokenize(r.hypothesis) << '\n';
    }
    if (!result.sizes.empty()) {
        auto out = open("ref.txt");
        for (const auto &r : result.sizes.front().sentences)
            out << textproc::detokenize(r.reference) << '\n';
    }
}

} // namespace simulst::eval
