// simulst: command-line front end.
//
//   simulst evaluate          sweep segment sizes over a corpus and write latency/quality reports
//   simulst prepare-mixture   build one fine-tuning mixture (TSV + manifest)
//   simulst extract-prefixes  prefix-to-prefix pairs from an agent's intermediate outputs
//   simulst postprocess       repetition removal on plain-text hypotheses
//   simulst score-exchange    export requests for / import results from an external scorer
//
// Exit codes: 0 success, 1 configuration error, 2 agent or protocol error, 3 data error.

#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "simulst/simulst.hpp"

namespace {

using namespace simulst;

enum Exit { kOk = 0, kConfig = 1, kAgent = 2, kData = 3 };

std::ofstream open_output(const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("cannot write '" + path + "'");
    return out;
}

std::ifstream open_input(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw DataError("cannot open '" + path + "'");
    return in;
}

// Command-line values; only the ones given override the config file.
struct EvaluateArgs {
    std::string config;
    std::optional<std::string> corpus, system, agent, lexicon, default_style, command, host, policy, style,
        reference, output;
    std::optional<int> port;
    std::optional<std::int64_t> timeout_ms;
    std::optional<std::size_t> la_n, k, max_output_tokens, jobs;
    std::optional<std::uint64_t> seed;
    std::vector<Millis> segment_sizes;
    bool brackets = false;
    bool trigram = false;
    bool al_reference_length = false;
    bool quiet = false;
};

void add_evaluate(CLI::App &app, EvaluateArgs &a) {
    app.add_option("-c,--config", a.config, "run config JSON; flags below override its fields");
    app.add_option("--corpus", a.corpus, "timed corpus (JSONL)");
    app.add_option("--system", a.system, "label for the report rows");
    app.add_option("--agent", a.agent, "toy, process or socket");
    app.add_option("--lexicon", a.lexicon, "toy agent lexicon");
    app.add_option("--toy-style", a.default_style, "toy style when no tag is forced (si or off)");
    app.add_option("--command", a.command, "process agent command line");
    app.add_option("--host", a.host, "socket agent host");
    app.add_option("--port", a.port, "socket agent port");
    app.add_option("--timeout-ms", a.timeout_ms, "agent response timeout");
    app.add_option("--policy", a.policy, "la or wait-k");
    app.add_option("--la-n", a.la_n, "Local Agreement window");
    app.add_option("--k", a.k, "wait-k lag in segments");
    app.add_option("--max-output-tokens", a.max_output_tokens, "divergence guard");
    app.add_option("--style", a.style, "forced style tag: si, off or none");
    app.add_option("--reference", a.reference, "reference to score against: si or off");
    app.add_option("--segment-sizes", a.segment_sizes, "segment sizes in ms")->delimiter(',');
    app.add_flag("--rmrep-brackets", a.brackets, "drop bracketed annotations from the output");
    app.add_flag("--rmrep-trigram", a.trigram, "stop the output at a thrice-repeated 3-gram");
    app.add_flag("--al-reference-length", a.al_reference_length, "AL rate from the reference length");
    app.add_option("-o,--output", a.output, "directory for report and data files");
    app.add_option("--seed", a.seed, "recorded in the run; evaluation itself is deterministic");
    app.add_option("-j,--jobs", a.jobs, "concurrent sessions");
    app.add_flag("-q,--quiet", a.quiet, "do not print the report to stdout");
}

eval::RunConfig build_run_config(const EvaluateArgs &a) {
    eval::RunConfig c;
    if (!a.config.empty())
        c = eval::load_run_config(a.config);
    if (a.corpus)
        c.corpus_path = *a.corpus;
    if (a.system)
        c.system = *a.system;
    if (a.agent)
        c.agent.kind = parse_agent_kind(*a.agent);
    if (a.lexicon)
        c.agent.lexicon_path = *a.lexicon;
    if (a.default_style)
        c.agent.default_style = parse_toy_style(*a.default_style);
    if (a.command)
        c.agent.command = *a.command;
    if (a.host)
        c.agent.host = *a.host;
    if (a.port)
        c.agent.port = *a.port;
    if (a.timeout_ms)
        c.agent.timeout = std::chrono::milliseconds(*a.timeout_ms);
    if (a.policy)
        c.policy.kind = parse_policy_kind(*a.policy);
    if (a.la_n)
        c.policy.la_n = *a.la_n;
    if (a.k)
        c.policy.k = *a.k;
    if (a.max_output_tokens)
        c.policy.max_output_tokens = *a.max_output_tokens;
    if (a.style)
        c.style = parse_style_tag(*a.style);
    if (a.reference)
        c.reference = parse_style_tag(*a.reference);
    if (!a.segment_sizes.empty())
        c.segment_sizes_ms = a.segment_sizes;
    c.rmrep.brackets = c.rmrep.brackets || a.brackets;
    c.rmrep.trigram = c.rmrep.trigram || a.trigram;
    c.al_reference_length = c.al_reference_length || a.al_reference_length;
    if (a.output)
        c.output_dir = *a.output;
    if (a.seed)
        c.seed = *a.seed;
    if (a.jobs)
        c.jobs = *a.jobs;
    c.agent.si_tag = c.si_tag;
    c.agent.off_tag = c.off_tag;
    return c;
}

int run_evaluate(const EvaluateArgs &a) {
    const auto config = build_run_config(a);
    const auto result = eval::evaluate(config);
    if (!config.output_dir.empty())
        eval::write_outputs(result, config.output_dir);
    if (!a.quiet)
        metrics::write_reports_csv(std::cout, result.reports());
    return kOk;
}

struct MixtureArgs {
    std::vector<std::string> inputs;
    std::string condition;
    std::optional<std::size_t> factor;
    std::uint64_t seed = 0;
    std::string output;
    std::string manifest;
    bool keep_unaligned = false;
};

int run_mixture(const MixtureArgs &a) {
    std::vector<dataprep::CorpusExample> examples;
    for (const auto &path : a.inputs) {
        auto part = dataprep::read_examples_file(path);
        examples.insert(examples.end(), part.begin(), part.end());
    }
    const auto before = examples.size();
    if (!a.keep_unaligned)
        examples = dataprep::filter_unaligned(examples);
    if (examples.size() != before)
        std::cerr << "dropped " << before - examples.size() << " unaligned examples\n";

    dataprep::MixtureConfig cfg;
    cfg.condition = dataprep::parse_condition(a.condition);
    cfg.seed = a.seed;
    if (a.factor) {
        cfg.upsample_factor = *a.factor;
    } else if (cfg.condition == dataprep::Condition::kMixedFTStyleUp) {
        std::size_t off = 0;
        std::size_t si = 0;
        for (const auto &ex : examples)
            (ex.origin == dataprep::Origin::kSI ? si : off) += 1;
        cfg.upsample_factor = dataprep::balanced_upsample_factor(off, si);
    }
    const auto mix = dataprep::build_mixture(examples, cfg);
    {
        auto out = open_output(a.output);
        for (const auto &line : mix.lines)
            out << line << '\n';
    }
    const auto manifest_json = dataprep::manifest_to_json(mix.manifest).dump(2);
    auto out = open_output(a.manifest.empty() ? a.output + ".manifest.json" : a.manifest);
    out << manifest_json << '\n';
    std::cout << manifest_json << '\n';
    return kOk;
}

struct ExtractArgs {
    std::string corpus;
    std::string lexicon;
    std::string si_command;
    std::string off_command;
    std::string origins = "both";
    bool tagged = false;
    std::int64_t timeout_ms = 30'000;
    std::size_t jobs = 1;
    std::string output;
};

int run_extract(const ExtractArgs &a) {
    const auto corpus = read_corpus_file(a.corpus);
    const auto factory = [&](const std::string &command, ToyStyle toy_style) -> dataprep::AgentFactory {
        AgentHandle h;
        if (command.empty()) {
            h.kind = AgentKind::kBuiltinToy;
            h.lexicon_path = a.lexicon;
            h.default_style = toy_style;
        } else {
            h.kind = AgentKind::kExternalProcess;
            h.command = command;
        }
        h.timeout = std::chrono::milliseconds(a.timeout_ms);
        h.validate();
        return [h] { return make_agent(h); };
    };
    std::vector<dataprep::OriginExtraction> origins;
    if (a.origins != "si" && a.origins != "off" && a.origins != "both")
        throw ConfigError("--origins must be si, off or both");
    if (a.origins != "si")
        origins.push_back({dataprep::Origin::kOffline, factory(a.off_command, ToyStyle::kOffline),
                           a.tagged ? StyleTagChoice::offline() : StyleTagChoice::none()});
    if (a.origins != "off")
        origins.push_back({dataprep::Origin::kSI, factory(a.si_command, ToyStyle::kSI),
                           a.tagged ? StyleTagChoice::si() : StyleTagChoice::none()});

    const auto result = dataprep::extract_corpus(corpus, origins, a.jobs);
    for (const auto &f : result.failures)
        std::cerr << "skipped " << f.utterance_id << " (" << dataprep::to_string(f.origin) << "): " << f.message
                  << '\n';
    if (a.output.empty() || a.output == "-") {
        dataprep::write_examples(std::cout, result.examples);
    } else {
        auto out = open_output(a.output);
        dataprep::write_examples(out, result.examples);
    }
    std::cerr << result.examples.size() << " prefix pairs from " << corpus.size() << " utterances\n";
    return result.examples.empty() && !result.failures.empty() ? kAgent : kOk;
}

struct PostprocessArgs {
    std::string input = "-";
    std::string output = "-";
    bool brackets = false;
    bool trigram = false;
};

int run_postprocess(const PostprocessArgs &a) {
    if (!a.brackets && !a.trigram)
        throw ConfigError("postprocess needs --brackets and/or --trigram");
    std::ifstream file;
    if (a.input != "-")
        file = open_input(a.input);
    std::istream &in = a.input == "-" ? std::cin : file;
    std::ofstream out_file;
    if (a.output != "-")
        out_file = open_output(a.output);
    std::ostream &out = a.output == "-" ? std::cout : out_file;
    std::string line;
    while (std::getline(in, line))
        out << textproc::detokenize(textproc::apply_rmrep(textproc::tokenize(line), {a.brackets, a.trigram}))
            << '\n';
    return kOk;
}

struct ScoreArgs {
    std::string run_dir;
    std::string file;
    std::string metric = "external";
};

int run_score_export(const ScoreArgs &a) {
    const auto requests = eval::collect_requests(a.run_dir);
    auto out = open_output(a.file);
    eval::write_requests(out, requests);
    std::cerr << requests.size() << " scoring requests written to " << a.file << '\n';
    return kOk;
}

int run_score_import(const ScoreArgs &a) {
    const auto requests = eval::collect_requests(a.run_dir);
    auto in = open_input(a.file);
    const auto scores = eval::import_scores(in, requests);
    const auto path = (std::filesystem::path(a.run_dir) / ("scores_" + a.metric + ".csv")).string();
    auto out = open_output(path);
    const auto write = [&](std::ostream &os) {
        os << "metric,segment_ms,mean,count\n";
        for (const auto &s : scores)
            os << metrics::detail::csv_escape(a.metric) << ',' << s.segment_ms << ','
               << metrics::format_number(s.mean) << ',' << s.count << '\n';
    };
    write(out);
    write(std::cout);
    return kOk;
}

} // namespace

int main(int argc, char **argv) {
    std::signal(SIGPIPE, SIG_IGN);

    CLI::App app{"Simultaneous translation evaluation harness"};
    app.require_subcommand(1);

    EvaluateArgs eval_args;
    auto *evaluate = app.add_subcommand("evaluate", "run sessions over a corpus and report latency and quality");
    add_evaluate(*evaluate, eval_args);

    MixtureArgs mix_args;
    auto *mixture = app.add_subcommand("prepare-mixture", "build a fine-tuning mixture");
    mixture->add_option("-i,--input", mix_args.inputs, "examples or timed corpus (JSONL), repeatable")->required();
    mixture->add_option("--condition", mix_args.condition,
                        "offline_ft, si_ft, mixed_ft, mixed_ft_style or mixed_ft_style_up")
        ->required();
    mixture->add_option("--upsample-factor", mix_args.factor,
                        "SI repetition for mixed_ft_style_up (default: balance the two origins)");
    mixture->add_option("--seed", mix_args.seed, "shuffle seed");
    mixture->add_option("-o,--output", mix_args.output, "training file (source<TAB>target)")->required();
    mixture->add_option("--manifest", mix_args.manifest, "manifest path (default: OUTPUT.manifest.json)");
    mixture->add_flag("--keep-unaligned", mix_args.keep_unaligned, "keep examples lacking token times");

    ExtractArgs ex_args;
    auto *extract = app.add_subcommand("extract-prefixes", "prefix-to-prefix pairs per utterance");
    extract->add_option("--corpus", ex_args.corpus, "timed corpus (JSONL)")->required();
    extract->add_option("--lexicon", ex_args.lexicon, "toy lexicon for origins without a command");
    extract->add_option("--si-command", ex_args.si_command, "process agent for SI pairs");
    extract->add_option("--off-command", ex_args.off_command, "process agent for offline pairs");
    extract->add_option("--origins", ex_args.origins, "si, off or both");
    extract->add_flag("--tagged", ex_args.tagged, "force each origin's style tag");
    extract->add_option("--timeout-ms", ex_args.timeout_ms, "agent response timeout");
    extract->add_option("-j,--jobs", ex_args.jobs, "worker threads");
    extract->add_option("-o,--output", ex_args.output, "examples output (JSONL, '-' for stdout)");

    PostprocessArgs pp_args;
    auto *post = app.add_subcommand("postprocess", "repetition removal on hypothesis lines");
    post->add_option("-i,--input", pp_args.input, "input text ('-' for stdin)");
    post->add_option("-o,--output", pp_args.output, "output text ('-' for stdout)");
    post->add_flag("--brackets", pp_args.brackets, "drop bracketed annotations");
    post->add_flag("--trigram", pp_args.trigram, "stop at a thrice-repeated 3-gram");

    ScoreArgs export_args;
    ScoreArgs import_args;
    auto *score = app.add_subcommand("score-exchange", "file exchange with an external scorer");
    score->require_subcommand(1);
    auto *exp = score->add_subcommand("export", "write scoring requests for an evaluate run");
    exp->add_option("--run", export_args.run_dir, "evaluate output directory")->required();
    exp->add_option("-o,--output", export_args.file, "requests file (JSONL)")->required();
    auto *imp = score->add_subcommand("import", "average returned scores per segment size");
    imp->add_option("--run", import_args.run_dir, "evaluate output directory")->required();
    imp->add_option("--scores", import_args.file, "scores file (JSONL)")->required();
    imp->add_option("--metric", import_args.metric, "metric name for the summary file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kConfig;
    }

    try {
        if (*evaluate)
            return run_evaluate(eval_args);
        if (*mixture)
            return run_mixture(mix_args);
        if (*extract)
            return run_extract(ex_args);
        if (*post)
            return run_postprocess(pp_args);
        if (*exp)
            return run_score_export(export_args);
        if (*imp)
            return run_score_import(import_args);
    } catch (const ConfigError &e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kConfig;
    } catch (const AgentError &e) {
        std::cerr << "agent error: " << e.what() << '\n';
        return kAgent;
    } catch (const DataError &e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kData;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kData;
    }
    return kOk;
}
