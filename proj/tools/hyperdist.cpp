// hyperdist: build count-based distributional spaces from dependency-parsed
// corpora and score/evaluate unsupervised hypernymy detection measures.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hyperdist/corpus.hpp"
#include "hyperdist/errors.hpp"
#include "hyperdist/eval.hpp"
#include "hyperdist/measures.hpp"
#include "hyperdist/parallel.hpp"
#include "hyperdist/space.hpp"
#include "hyperdist/version.hpp"

namespace hd = hyperdist;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// Small shared helpers
// ---------------------------------------------------------------------------

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw hd::IoError("cannot open output file: " + path);
    out << text;
    if (!out) throw hd::IoError("failed writing output file: " + path);
}

// Every run writes a manifest next to its primary output.  Manifests echo the
// resolved configuration and tool version only; they deliberately omit
// wall-clock timestamps and the worker count so that reruns (and runs with
// different --jobs values) produce byte-identical files.
void write_manifest(const std::string& out_path, json manifest) {
    manifest["tool"] = hd::kToolName;
    manifest["version"] = hd::kToolVersion;
    write_text_file(out_path + ".manifest.json", manifest.dump(2) + "\n");
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw hd::IoError("cannot open input file: " + path);
    return in;
}

// Dataset preparation shared by score/tune: label mapping, then multi-label
// conflation, then part-of-speech augmentation against the space vocabulary.
struct DatasetPrepOptions {
    std::string label_map_path;
    bool conflate = false;
    bool pos_augment = false;
};

std::vector<hd::RelationPair> prepare_dataset(std::vector<hd::RelationPair> pairs,
                                              const DatasetPrepOptions& prep,
                                              const hd::Vocabulary& vocab,
                                              json& manifest) {
    if (!prep.label_map_path.empty()) {
        hd::LabelMap map = hd::load_label_map(prep.label_map_path);
        pairs = hd::apply_label_map(pairs, map);
        manifest["label_map"] = prep.label_map_path;
    }
    if (prep.conflate) {
        pairs = hd::conflate_multilabel(pairs);
        manifest["conflate"] = true;
    }
    if (prep.pos_augment) {
        std::uint64_t dropped = 0;
        pairs = hd::pos_augment(pairs, vocab, &dropped);
        manifest["pos_augment"] = true;
        manifest["pos_augment_dropped"] = dropped;
    }
    manifest["pairs"] = pairs.size();
    return pairs;
}

hd::MeasureConfig make_measure_config(hd::Measure measure, int top_n,
                                      const std::string& aggregate,
                                      const std::string& sort_weighting,
                                      bool normalized_entropy,
                                      const std::string& apinc_norm) {
    hd::MeasureConfig cfg;
    cfg.measure = measure;
    cfg.top_n = top_n;
    cfg.aggregate = hd::parse_aggregate(aggregate);
    cfg.sort_weighting = hd::parse_weighting(sort_weighting);
    cfg.normalized_entropy = normalized_entropy;
    cfg.apinc_hyponym_norm = apinc_norm == "hyponym";
    return cfg;
}

// ---------------------------------------------------------------------------
// Score file format: TSV with a header row.  `score` is NA when undefined and
// `defined` then carries the reason (e.g. "false:oov").
// ---------------------------------------------------------------------------

const char* kScoreHeader = "x\ty\trelation\tmeasure\tcontext\tweighting\thyperparams\tscore\tdefined";

std::string render_scores(const std::vector<hd::ScoredRow>& rows,
                          const hd::MeasureConfig& cfg,
                          const std::string& context_name,
                          hd::Weighting weighting) {
    std::string out;
    out += kScoreHeader;
    out += '\n';
    const std::string meta = std::string(hd::measure_name(cfg.measure)) + '\t' + context_name +
                             '\t' + std::string(hd::weighting_name(weighting)) + '\t' +
                             cfg.hyper_string();
    for (const auto& row : rows) {
        out += row.x;
        out += '\t';
        out += row.y;
        out += '\t';
        out += row.relation;
        out += '\t';
        out += meta;
        out += '\t';
        out += row.defined ? format_double(row.score) : std::string("NA");
        out += '\t';
        out += row.defined ? std::string("true") : "false:" + row.reason;
        out += '\n';
    }
    return out;
}

struct ParsedScores {
    std::vector<hd::ScoredRow> rows;
    std::string measure;
    std::string context;
    std::string weighting;
    std::string hyperparams;
};

std::vector<std::string> split_fields(const std::string& line, char sep) {
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
        size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

ParsedScores parse_scores(std::istream& in) {
    ParsedScores parsed;
    std::string line;
    size_t lineno = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!saw_header) {
            if (line != kScoreHeader)
                throw hd::FormatError("score file line 1: unexpected header");
            saw_header = true;
            continue;
        }
        std::vector<std::string> f = split_fields(line, '\t');
        if (f.size() != 9)
            throw hd::FormatError("score file line " + std::to_string(lineno) +
                                  ": expected 9 tab-separated columns");
        if (parsed.rows.empty()) {
            parsed.measure = f[3];
            parsed.context = f[4];
            parsed.weighting = f[5];
            parsed.hyperparams = f[6];
        } else if (f[3] != parsed.measure || f[4] != parsed.context ||
                   f[5] != parsed.weighting || f[6] != parsed.hyperparams) {
            throw hd::FormatError("score file line " + std::to_string(lineno) +
                                  ": mixes measure configurations");
        }
        hd::ScoredRow row;
        row.x = f[0];
        row.y = f[1];
        row.relation = f[2];
        if (f[7] == "NA") {
            row.defined = false;
            row.score = 0.0;
            row.reason = f[8].rfind("false:", 0) == 0 ? f[8].substr(6) : f[8];
        } else {
            row.defined = true;
            try {
                row.score = std::stod(f[7]);
            } catch (const std::exception&) {
                throw hd::FormatError("score file line " + std::to_string(lineno) +
                                      ": invalid score value '" + f[7] + "'");
            }
            row.reason = "ok";
        }
        parsed.rows.push_back(std::move(row));
    }
    if (!saw_header) throw hd::FormatError("score file line 1: missing header");
    return parsed;
}

// ---------------------------------------------------------------------------
// build-space
// ---------------------------------------------------------------------------

struct BuildSpaceArgs {
    std::string corpus;
    std::string context = "win2";
    std::string weighting = "ppmi";
    std::uint64_t min_freq = 100;
    std::string config_path;
    std::string out;
    std::string aux_pmi_out;
    std::string export_text_path;
    unsigned jobs = 0;
    bool context_set = false;
    bool min_freq_set = false;
};

int run_build_space(const BuildSpaceArgs& args) {
    hd::IngestConfig config;
    if (!args.config_path.empty()) config = hd::IngestConfig::load(args.config_path);

    // Explicit command-line flags win over the config file.
    hd::ContextSpec spec = hd::ContextSpec::parse(args.context);
    if (!args.context_set && config.context) spec = *config.context;
    const std::uint64_t min_freq = args.min_freq_set ? args.min_freq : config.min_freq;
    const hd::Weighting weighting = hd::parse_weighting(args.weighting);

    // Pass 1: count candidate target items and build the vocabulary.
    hd::VocabCounter counter;
    {
        std::ifstream in = open_input(args.corpus);
        hd::ConllReader reader(in, config.columns, &config.pos_map);
        hd::Sentence sentence;
        while (reader.next(sentence)) counter.add(sentence);
    }
    hd::Vocabulary vocab = counter.build(min_freq);

    // Pass 2: extract co-occurrence events.  When an auxiliary word-word PMI
    // table is requested it is accumulated in the same pass from
    // indirectional 5-word windows over the same vocabulary.
    hd::CoocAccumulator acc(vocab);
    std::optional<hd::CoocAccumulator> aux_acc;
    const hd::ContextSpec aux_spec{hd::ContextKind::window, 5, false};
    if (!args.aux_pmi_out.empty()) aux_acc.emplace(vocab);
    hd::ConllStats stats;
    {
        std::ifstream in = open_input(args.corpus);
        hd::ConllReader reader(in, config.columns, &config.pos_map);
        hd::Sentence sentence;
        std::vector<hd::CoocEvent> events;
        while (reader.next(sentence)) {
            events.clear();
            hd::extract_contexts(sentence, spec, vocab, events);
            acc.add(events);
            if (aux_acc) {
                events.clear();
                hd::extract_contexts(sentence, aux_spec, vocab, events);
                aux_acc->add(events);
            }
        }
        stats = reader.stats();
    }

    hd::CooccurrenceMatrix counts = std::move(acc).finalize();
    hd::WeightedSpace space = hd::WeightedSpace::build(std::move(counts), weighting, spec, args.jobs);
    hd::save_space(space, args.out);

    json outputs;
    outputs["space"] = args.out;
    if (aux_acc) {
        hd::AuxPmiTable aux = hd::AuxPmiTable::build(std::move(*aux_acc).finalize());
        hd::save_aux_pmi(aux, args.aux_pmi_out);
        outputs["aux_pmi"] = args.aux_pmi_out;
    }
    if (!args.export_text_path.empty()) {
        std::ofstream out(args.export_text_path, std::ios::binary);
        if (!out) throw hd::IoError("cannot open output file: " + args.export_text_path);
        hd::export_text(space, out);
        if (!out) throw hd::IoError("failed writing output file: " + args.export_text_path);
        outputs["export_text"] = args.export_text_path;
    }

    json manifest;
    manifest["subcommand"] = "build-space";
    manifest["corpus"] = args.corpus;
    manifest["context"] = spec.name();
    manifest["canonical_context"] = spec.canonical();
    manifest["weighting"] = args.weighting;
    manifest["min_freq"] = min_freq;
    if (!args.config_path.empty()) manifest["config"] = args.config_path;
    manifest["sentences"] = stats.sentences;
    manifest["skipped_sentences"] = stats.skipped;
    manifest["vocabulary_size"] = space.base().vocabulary().size();
    manifest["context_count"] = space.base().num_contexts();
    manifest["events"] = space.base().total();
    manifest["outputs"] = outputs;
    write_manifest(args.out, manifest);

    std::cout << "vocabulary: " << space.base().vocabulary().size() << " items\n"
              << "contexts: " << space.base().num_contexts() << "\n"
              << "events: " << space.base().total() << "\n"
              << "sentences: " << stats.sentences << " (skipped " << stats.skipped << ")\n"
              << "wrote: " << args.out << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// score
// ---------------------------------------------------------------------------

struct ScoreArgs {
    std::string space;
    std::string dataset;
    std::string measure;
    int top_n = 0;
    std::string aggregate = "median";
    std::string sort_weighting = "ppmi";
    bool normalize_entropy = false;
    std::string apinc_norm = "hypernym";
    std::string aux_pmi;
    DatasetPrepOptions prep;
    unsigned jobs = 0;
    std::string out;
};

int run_score(const ScoreArgs& args) {
    hd::WeightedSpace space = hd::load_space(args.space);
    std::optional<hd::AuxPmiTable> aux;
    if (!args.aux_pmi.empty()) aux = hd::load_aux_pmi(args.aux_pmi);

    json manifest;
    manifest["subcommand"] = "score";
    manifest["space"] = args.space;
    manifest["dataset"] = args.dataset;
    if (!args.aux_pmi.empty()) manifest["aux_pmi"] = args.aux_pmi;

    std::vector<hd::RelationPair> pairs = hd::load_dataset_file(args.dataset);
    pairs = prepare_dataset(std::move(pairs), args.prep, space.base().vocabulary(), manifest);

    const hd::MeasureConfig cfg =
        make_measure_config(hd::parse_measure(args.measure), args.top_n, args.aggregate,
                            args.sort_weighting, args.normalize_entropy, args.apinc_norm);
    std::vector<hd::ScoredRow> rows =
        hd::score_pairs(space, cfg, pairs, aux ? &*aux : nullptr, args.jobs);

    write_text_file(args.out, render_scores(rows, cfg, space.context_spec().name(), space.weighting()));

    manifest["measure"] = hd::measure_name(cfg.measure);
    manifest["hyperparams"] = cfg.hyper_string();
    manifest["context"] = space.context_spec().name();
    manifest["weighting"] = hd::weighting_name(space.weighting());
    std::uint64_t scoreless = 0;
    for (const auto& row : rows)
        if (!row.defined) ++scoreless;
    manifest["scoreless"] = scoreless;
    json outputs;
    outputs["scores"] = args.out;
    manifest["outputs"] = outputs;
    write_manifest(args.out, manifest);

    std::cout << "scored: " << rows.size() << " pairs (" << scoreless << " scoreless)\n"
              << "wrote: " << args.out << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

struct EvaluateArgs {
    std::string scores;
    std::string dataset;
    std::string relation = "all";
    std::string ks = "100,all";
    std::string out;
};

std::vector<std::size_t> parse_ks(const std::string& text) {
    std::vector<std::size_t> ks;
    for (const std::string& part : split_fields(text, ',')) {
        if (part == "all") {
            ks.push_back(hd::kAllRanks);
            continue;
        }
        std::size_t pos = 0;
        unsigned long long v = 0;
        try {
            v = std::stoull(part, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != part.size() || v == 0)
            throw hd::FormatError("invalid rank cutoff: '" + part + "'");
        ks.push_back(static_cast<std::size_t>(v));
    }
    if (ks.empty()) throw hd::FormatError("no rank cutoffs given");
    return ks;
}

int run_evaluate(const EvaluateArgs& args) {
    std::ifstream in = open_input(args.scores);
    ParsedScores parsed = parse_scores(in);

    // With --dataset the gold pair population comes from the dataset file:
    // each scored row takes its relation from the dataset and rows absent
    // from the dataset are dropped.
    if (!args.dataset.empty()) {
        std::vector<hd::RelationPair> gold = hd::load_dataset_file(args.dataset);
        std::map<std::pair<std::string, std::string>, std::string> relations;
        for (const auto& p : gold) relations[{p.x, p.y}] = p.relation;
        std::vector<hd::ScoredRow> kept;
        for (auto& row : parsed.rows) {
            auto it = relations.find({row.x, row.y});
            if (it == relations.end()) continue;
            row.relation = it->second;
            kept.push_back(std::move(row));
        }
        parsed.rows = std::move(kept);
    }

    const std::vector<std::size_t> ks = parse_ks(args.ks);
    hd::EvaluationReport report = hd::evaluate(parsed.rows, args.relation, ks);
    report.dataset = args.dataset.empty() ? args.scores : args.dataset;
    report.measure = parsed.measure;
    report.context = parsed.context;
    report.weighting = parsed.weighting;
    report.hyperparams = parsed.hyperparams;

    const std::string md_path = args.out + ".md";
    write_text_file(args.out, report.to_json_line() + "\n");
    write_text_file(md_path,
                    hd::EvaluationReport::markdown_header() + "\n" + report.markdown_row() + "\n");

    json manifest;
    manifest["subcommand"] = "evaluate";
    manifest["scores"] = args.scores;
    if (!args.dataset.empty()) manifest["dataset"] = args.dataset;
    manifest["relation"] = args.relation;
    manifest["k"] = args.ks;
    json outputs;
    outputs["report"] = args.out;
    outputs["markdown"] = md_path;
    manifest["outputs"] = outputs;
    write_manifest(args.out, manifest);

    for (const auto& [k, ap] : report.ap)
        std::cout << "AP@" << k << ": " << format_double(ap) << "\n";
    std::cout << "positives: " << report.positives << ", negatives: " << report.negatives
              << ", scoreless: " << report.scoreless << "\n"
              << "wrote: " << args.out << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// tune
// ---------------------------------------------------------------------------

struct TuneArgs {
    std::string space;
    std::string dataset;
    std::string measure;
    std::string relation = "all";
    std::uint64_t seed = 42;
    std::string aux_pmi;
    bool normalize_entropy = false;
    std::string apinc_norm = "hypernym";
    DatasetPrepOptions prep;
    unsigned jobs = 0;
    std::string out;
};

int run_tune(const TuneArgs& args) {
    hd::WeightedSpace space = hd::load_space(args.space);
    std::optional<hd::AuxPmiTable> aux;
    if (!args.aux_pmi.empty()) aux = hd::load_aux_pmi(args.aux_pmi);

    json manifest;
    manifest["subcommand"] = "tune";
    manifest["space"] = args.space;
    manifest["dataset"] = args.dataset;
    if (!args.aux_pmi.empty()) manifest["aux_pmi"] = args.aux_pmi;
    manifest["measure"] = args.measure;
    manifest["relation"] = args.relation;
    manifest["seed"] = args.seed;

    std::vector<hd::RelationPair> pairs = hd::load_dataset_file(args.dataset);
    pairs = prepare_dataset(std::move(pairs), args.prep, space.base().vocabulary(), manifest);

    const hd::DatasetSplit split = hd::split_random(pairs, args.seed);
    const hd::Measure measure = hd::parse_measure(args.measure);
    const hd::TuneResult result =
        hd::tune(space, measure, split.validation, args.relation, aux ? &*aux : nullptr,
                 args.jobs, args.normalize_entropy, args.apinc_norm == "hyponym");

    json out_json;
    out_json["measure"] = args.measure;
    out_json["relation"] = args.relation;
    out_json["seed"] = args.seed;
    out_json["validation_pairs"] = split.validation.size();
    out_json["test_pairs"] = split.test.size();
    out_json["best_hyperparams"] = result.config.hyper_string();
    out_json["validation_ap100"] = result.ap100;
    write_text_file(args.out, out_json.dump(2) + "\n");

    manifest["validation_pairs"] = split.validation.size();
    manifest["test_pairs"] = split.test.size();
    manifest["best_hyperparams"] = result.config.hyper_string();
    manifest["validation_ap100"] = result.ap100;
    json outputs;
    outputs["result"] = args.out;
    manifest["outputs"] = outputs;
    write_manifest(args.out, manifest);

    std::cout << "best: measure=" << args.measure << ", " << result.config.hyper_string()
              << ", validation AP@100=" << format_double(result.ap100) << "\n"
              << "wrote: " << args.out << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// switch-pairs
// ---------------------------------------------------------------------------

struct SwitchPairsArgs {
    std::string dataset;
    std::uint64_t seed = 42;
    std::string out;
};

int run_switch_pairs(const SwitchPairsArgs& args) {
    std::vector<hd::RelationPair> pairs = hd::load_dataset_file(args.dataset);
    std::vector<hd::RelationPair> switched = hd::switched_pairs(pairs, args.seed);

    std::string text;
    for (const auto& p : pairs) text += p.x + '\t' + p.y + '\t' + p.relation + '\n';
    for (const auto& p : switched) text += p.x + '\t' + p.y + '\t' + p.relation + '\n';
    write_text_file(args.out, text);

    json manifest;
    manifest["subcommand"] = "switch-pairs";
    manifest["dataset"] = args.dataset;
    manifest["seed"] = args.seed;
    manifest["original_pairs"] = pairs.size();
    manifest["switched_pairs"] = switched.size();
    json outputs;
    outputs["dataset"] = args.out;
    manifest["outputs"] = outputs;
    write_manifest(args.out, manifest);

    std::cout << "original: " << pairs.size() << " pairs\n"
              << "switched: " << switched.size() << " pairs\n"
              << "wrote: " << args.out << "\n";
    return 0;
}

// ---------------------------------------------------------------------------
// Argument wiring
// ---------------------------------------------------------------------------

std::vector<std::string> measure_names() {
    std::vector<std::string> names;
    for (hd::Measure m : hd::kAllMeasures) names.emplace_back(hd::measure_name(m));
    return names;
}

std::string validate_context(const std::string& value) {
    try {
        (void)hd::ContextSpec::parse(value);
    } catch (const hd::Error& e) {
        return e.what();
    }
    return {};
}

void add_prep_options(CLI::App* cmd, DatasetPrepOptions& prep) {
    cmd->add_option("--label-map", prep.label_map_path,
                    "TSV file mapping raw relation labels to canonical ones");
    cmd->add_flag("--conflate", prep.conflate,
                  "Conflate multi-label pairs: keep one hypernym row per (x, y)");
    cmd->add_flag("--pos-augment", prep.pos_augment,
                  "Expand bare words to POS-tagged items found in the vocabulary");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(hd::kToolName) +
                 " - distributional spaces and unsupervised hypernymy measures"};
    app.set_version_flag("--version", std::string(hd::kToolVersion));
    app.require_subcommand(1);

    BuildSpaceArgs build_args;
    CLI::App* build = app.add_subcommand("build-space",
                                         "Build a weighted co-occurrence space from a CoNLL corpus");
    build->add_option("--corpus", build_args.corpus, "Dependency-parsed corpus (CoNLL columns)")
        ->required();
    build->add_option("--context", build_args.context,
                      "Context type: win2, win2d, win5, win5d, dep, joint")
        ->check(CLI::Validator(validate_context, "CONTEXT"));
    build->add_option("--weighting", build_args.weighting, "Cell weighting")
        ->check(CLI::IsMember({"freq", "ppmi", "plmi"}));
    build->add_option("--min-freq", build_args.min_freq, "Minimum target item frequency")
        ->check(CLI::PositiveNumber);
    build->add_option("--config", build_args.config_path,
                      "Ingestion config file (column map, POS map, context, min_freq)");
    build->add_option("--aux-pmi", build_args.aux_pmi_out,
                      "Also write the auxiliary word-word PMI table to this path");
    build->add_option("--export-text", build_args.export_text_path,
                      "Also write the weighted space as item<TAB>context<TAB>value text");
    build->add_option("--jobs", build_args.jobs, "Worker threads (0 = auto)");
    build->add_option("--out", build_args.out, "Output space file")->required();

    ScoreArgs score_args;
    CLI::App* score = app.add_subcommand("score", "Score dataset pairs with one measure");
    score->add_option("--space", score_args.space, "Space file from build-space")->required();
    score->add_option("--dataset", score_args.dataset, "Pair dataset: x<TAB>y<TAB>relation")
        ->required();
    score->add_option("--measure", score_args.measure, "Measure name")
        ->required()
        ->check(CLI::IsMember(measure_names()));
    score->add_option("--N", score_args.top_n, "Top-context cutoff (0 = measure default)")
        ->check(CLI::NonNegativeNumber);
    score->add_option("--aggregate", score_args.aggregate, "Top-context entropy aggregation")
        ->check(CLI::IsMember({"median", "average"}));
    score->add_option("--sort-weighting", score_args.sort_weighting,
                      "Weighting used to rank contexts for top-N selection")
        ->check(CLI::IsMember({"ppmi", "plmi"}));
    score->add_flag("--normalize-entropy", score_args.normalize_entropy,
                    "Normalize entropies by the log of the support size");
    score->add_option("--apinc-norm", score_args.apinc_norm,
                      "APinc normalization: hypernym (default) or hyponym")
        ->check(CLI::IsMember({"hypernym", "hyponym"}));
    score->add_option("--aux-pmi", score_args.aux_pmi,
                      "Auxiliary word-word PMI table (required for rctc)");
    add_prep_options(score, score_args.prep);
    score->add_option("--jobs", score_args.jobs, "Worker threads (0 = auto)");
    score->add_option("--out", score_args.out, "Output score TSV")->required();

    EvaluateArgs eval_args;
    CLI::App* evaluate = app.add_subcommand("evaluate", "Rank scored pairs and report AP@k");
    evaluate->add_option("--scores", eval_args.scores, "Score TSV from the score subcommand")
        ->required();
    evaluate->add_option("--dataset", eval_args.dataset,
                         "Optional dataset supplying gold relations (drops unlisted pairs)");
    evaluate->add_option("--relation", eval_args.relation,
                         "Target relation treated as positive (or 'all')");
    evaluate->add_option("--k", eval_args.ks, "Comma-separated rank cutoffs, e.g. 100,all");
    evaluate->add_option("--out", eval_args.out, "Output report (JSON line; .md written alongside)")
        ->required();

    TuneArgs tune_args;
    CLI::App* tune = app.add_subcommand("tune",
                                        "Grid-search measure hyper-parameters on a validation split");
    tune->add_option("--space", tune_args.space, "Space file from build-space")->required();
    tune->add_option("--dataset", tune_args.dataset, "Pair dataset: x<TAB>y<TAB>relation")
        ->required();
    tune->add_option("--measure", tune_args.measure, "Measure name")
        ->required()
        ->check(CLI::IsMember(measure_names()));
    tune->add_option("--relation", tune_args.relation,
                     "Target relation treated as positive (or 'all')");
    tune->add_option("--seed", tune_args.seed, "Split seed");
    tune->add_option("--aux-pmi", tune_args.aux_pmi,
                     "Auxiliary word-word PMI table (required for rctc)");
    tune->add_flag("--normalize-entropy", tune_args.normalize_entropy,
                   "Normalize entropies by the log of the support size");
    tune->add_option("--apinc-norm", tune_args.apinc_norm,
                     "APinc normalization: hypernym (default) or hyponym")
        ->check(CLI::IsMember({"hypernym", "hyponym"}));
    add_prep_options(tune, tune_args.prep);
    tune->add_option("--jobs", tune_args.jobs, "Worker threads (0 = auto)");
    tune->add_option("--out", tune_args.out, "Output JSON with the best configuration")->required();

    SwitchPairsArgs switch_args;
    CLI::App* switch_cmd = app.add_subcommand("switch-pairs",
                                              "Append switched negative pairs to a dataset");
    switch_cmd->add_option("--dataset", switch_args.dataset, "Pair dataset: x<TAB>y<TAB>relation")
        ->required();
    switch_cmd->add_option("--seed", switch_args.seed, "Shuffle seed");
    switch_cmd->add_option("--out", switch_args.out, "Output dataset (original + switched pairs)")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    build_args.context_set = build->count("--context") > 0;
    build_args.min_freq_set = build->count("--min-freq") > 0;

    try {
        if (build->parsed()) return run_build_space(build_args);
        if (score->parsed()) return run_score(score_args);
        if (evaluate->parsed()) return run_evaluate(eval_args);
        if (tune->parsed()) return run_tune(tune_args);
        if (switch_cmd->parsed()) return run_switch_pairs(switch_args);
    } catch (const hd::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
