#include "gazeflow_cli/cli.hpp"

#include "gazeflow_cli/outputs.hpp"

#include "gazeflow/aoi.hpp"
#include "gazeflow/classify.hpp"
#include "gazeflow/error.hpp"
#include "gazeflow/features.hpp"
#include "gazeflow/fixation.hpp"
#include "gazeflow/ingest.hpp"
#include "gazeflow/quality.hpp"
#include "gazeflow/simulate.hpp"
#include "gazeflow/stats.hpp"
#include "gazeflow/table.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

namespace gazeflow::cli {
namespace {

namespace fs = std::filesystem;

struct FilterOptions {
    std::string participants;
    std::string trials;
    std::string gaze;
    std::string out_dir;
    QualityThresholds thresholds;
};

struct FixationOptions {
    std::string trials;
    std::string gaze;
    std::string out;
    FixationParams params;
    std::size_t jobs = 1;
};

struct FeatureOptions {
    std::string trials;
    std::string fixations;
    std::string boundaries;
    std::string participants;
    std::string out_dir;
    ExpansionParams expansion;
    std::size_t jobs = 1;
};

struct CompareOptions {
    std::string a;
    std::string b;
    std::string languages;
    std::string out;
};

struct TTestOptions {
    std::string trial_features;
    std::string task = "both";
    bool welch = false;
    std::string out;
};

struct ClassifyOptions {
    std::string trial_features;
    std::string task;
    std::string features = "et";
    std::string boundaries;
    std::size_t runs = 10;
    std::uint64_t seed = 42;
    std::vector<std::string> models{"random", "logistic", "forest"};
    std::size_t trees = 100;
    std::size_t jobs = 1;
    std::string out;
};

struct SimulateOptions {
    std::string out_dir;
    bool demo = false;
    DatasetSpec spec;
    std::uint64_t seed = 42;
};

struct ReportOptions {
    std::string comparison;
    std::string ttests;
    std::vector<std::string> evals;
    std::string out;
};

std::size_t resolve_jobs(std::size_t jobs)
{
    if (jobs != 0)
        return jobs;
    return std::max(1u, std::thread::hardware_concurrency());
}

GazeFormat format_for(const fs::path& path)
{
    const std::string ext = path.extension().string();
    if (ext == ".jsonl" || ext == ".json" || ext == ".ndjson")
        return GazeFormat::json_lines;
    return GazeFormat::csv;
}

std::string read_input(PendingOutputs& outputs, const std::string& path)
{
    outputs.note_input(path);
    return read_file(path);
}

template <typename Fn>
std::string render(Fn&& fn)
{
    std::ostringstream os;
    fn(os);
    return os.str();
}

void sort_canonical(std::vector<TrialRecord>& trials)
{
    std::sort(trials.begin(), trials.end(), [](const TrialRecord& a, const TrialRecord& b) {
        return std::tie(a.participant_id, a.text_id, a.trial_id) <
               std::tie(b.participant_id, b.text_id, b.trial_id);
    });
}

std::vector<TrialRecord> load_trials(PendingOutputs& outputs, const std::string& meta_path,
                                     const std::string& gaze_path, const KnownIds& known,
                                     std::ostream& err)
{
    auto trials = parse_trial_meta(read_input(outputs, meta_path), known);
    const GazeLog log = parse_gaze_log(read_input(outputs, gaze_path), format_for(gaze_path));
    if (log.duplicates_collapsed != 0)
        err << "warning: collapsed " << log.duplicates_collapsed << " duplicate timestamp(s)\n";
    if (log.reordered_trials != 0)
        err << "warning: reordered samples in " << log.reordered_trials << " trial(s)\n";

    AttachResult attached = attach_samples(std::move(trials), log);
    if (attached.orphan_samples != 0)
        err << "warning: " << attached.orphan_samples << " sample(s) from "
            << attached.orphan_trial_ids << " unknown trial id(s) ignored\n";
    if (attached.overlong_trials != 0)
        err << "warning: " << attached.overlong_trials
            << " trial(s) have samples past the recorded trial time\n";
    sort_canonical(attached.trials);
    return std::move(attached.trials);
}

int run_filter(const FilterOptions& o, std::ostream& out, std::ostream& err)
{
    o.thresholds.validate();
    PendingOutputs outputs;
    const auto participants = parse_participants(read_input(outputs, o.participants));

    KnownIds known;
    known.participants.emplace();
    for (const auto& p : participants)
        known.participants->insert(p.participant_id);
    const auto trials = load_trials(outputs, o.trials, o.gaze, known, err);

    FilterResult result = filter_participants(participants, trials, o.thresholds);
    std::sort(result.kept.begin(), result.kept.end(),
              [](const auto& a, const auto& b) { return a.participant_id < b.participant_id; });
    std::sort(result.rejected.begin(), result.rejected.end(),
              [](const auto& a, const auto& b) { return a.participant_id < b.participant_id; });

    const fs::path dir(o.out_dir);
    outputs.add(dir / "rejections.csv", render([&](std::ostream& os) { write_rejections(os, result); }));
    outputs.add(dir / "participants_kept.jsonl",
                render([&](std::ostream& os) { write_participants(os, result.kept); }));
    outputs.commit();
    out << rejection_summary(result) << '\n';
    return 0;
}

int run_fixations(const FixationOptions& o, std::ostream& out, std::ostream& err)
{
    o.params.validate();
    PendingOutputs outputs;
    const auto trials = load_trials(outputs, o.trials, o.gaze, {}, err);

    std::vector<TrialFixations> result(trials.size());
    parallel_for(trials.size(), resolve_jobs(o.jobs), [&](std::size_t i) {
        result[i].trial_id = trials[i].trial_id;
        result[i].fixations = run_pipeline(trials[i].samples, trials[i].frame, o.params);
    });

    std::size_t total = 0;
    for (const auto& t : result)
        total += t.fixations.size();
    outputs.add(o.out, render([&](std::ostream& os) { write_fixation_table(os, result); }));
    outputs.commit();
    out << total << " fixation(s) in " << result.size() << " trial(s)\n";
    return 0;
}

int run_features(const FeatureOptions& o, std::ostream& out, std::ostream& err)
{
    o.expansion.validate();
    PendingOutputs outputs;

    std::map<std::string, TextLayout> layouts;
    for (TextLayout layout : load_boundaries(read_input(outputs, o.boundaries))) {
        layout.words = expand_boxes(std::move(layout.words), o.expansion);
        const std::string id = layout.text_id;
        layouts.emplace(id, std::move(layout));
    }
    KnownIds known;
    known.texts.emplace();
    for (const auto& [id, layout] : layouts)
        known.texts->insert(id);

    auto trials = parse_trial_meta(read_input(outputs, o.trials), known);
    std::set<std::string> all_trial_ids;
    for (const auto& t : trials)
        all_trial_ids.insert(t.trial_id);
    if (!o.participants.empty()) {
        std::set<std::string> keep;
        for (const auto& p : parse_participants(read_input(outputs, o.participants)))
            keep.insert(p.participant_id);
        std::erase_if(trials, [&](const TrialRecord& t) { return !keep.contains(t.participant_id); });
    }
    sort_canonical(trials);

    std::map<std::string, std::vector<Fixation>> fixations;
    std::size_t unknown = 0;
    for (auto& tf : parse_fixation_table(read_input(outputs, o.fixations))) {
        if (!all_trial_ids.contains(tf.trial_id))
            ++unknown;
        fixations[tf.trial_id] = std::move(tf.fixations);
    }
    if (unknown != 0)
        err << "warning: fixations for " << unknown << " unknown trial id(s) ignored\n";

    const std::vector<Fixation> none;
    std::vector<std::vector<WordFeatureRow>> word_rows(trials.size());
    std::vector<TrialFeatures> trial_rows(trials.size());
    parallel_for(trials.size(), resolve_jobs(o.jobs), [&](std::size_t i) {
        const TrialRecord& trial = trials[i];
        const auto boxes = layouts.at(trial.text_id).with_targets(trial.question_id);
        const auto it = fixations.find(trial.trial_id);
        const std::vector<Fixation>& fx = it == fixations.end() ? none : it->second;

        auto words = word_features(fx, boxes);
        relative_fixation(words);
        for (auto& w : words)
            word_rows[i].push_back(WordFeatureRow{trial.participant_id, trial.text_id, w});
        trial_rows[i] = trial_features(trial, fx, boxes);
    });

    std::vector<WordFeatureRow> all_words;
    for (auto& rows : word_rows)
        all_words.insert(all_words.end(), rows.begin(), rows.end());

    const fs::path dir(o.out_dir);
    outputs.add(dir / "word_features.csv",
                render([&](std::ostream& os) { write_word_features(os, all_words); }));
    outputs.add(dir / "trial_features.csv",
                render([&](std::ostream& os) { write_trial_features(os, trial_rows); }));
    outputs.commit();
    out << trial_rows.size() << " trial(s), " << all_words.size() << " word row(s)\n";
    return 0;
}

std::map<std::string, std::string> load_languages(PendingOutputs& outputs, const std::string& path)
{
    std::map<std::string, std::string> languages;
    if (path.empty())
        return languages;
    const CsvTable table = CsvTable::parse(read_input(outputs, path));
    const std::size_t text = table.require("text_id");
    const std::size_t language = table.require("language");
    for (const auto& row : table.rows())
        languages[row.fields[text]] = row.fields[language];
    return languages;
}

int run_compare(const CompareOptions& o, std::ostream& out, std::ostream&)
{
    PendingOutputs outputs;
    const auto a = parse_word_features(read_input(outputs, o.a));
    const auto b = parse_word_features(read_input(outputs, o.b));
    const auto languages = load_languages(outputs, o.languages);
    const auto rows = compare_datasets(a, b, languages);

    outputs.add(o.out, render([&](std::ostream& os) { write_comparison(os, rows); }));
    outputs.commit();
    out << rows.size() << " shared text(s)\n";
    return 0;
}

std::vector<Task> tasks_for(const std::string& name)
{
    if (name == "both")
        return {Task::NR, Task::IS};
    return {parse_task(name)};
}

int run_ttest(const TTestOptions& o, std::ostream& out, std::ostream& err)
{
    PendingOutputs outputs;
    const DropResult drop = drop_empty_trials(parse_trial_features(read_input(outputs, o.trial_features)));
    if (drop.dropped != 0)
        err << "dropped " << drop.dropped << " trial(s) without fixations on the text\n";

    const VarianceModel variance = o.welch ? VarianceModel::welch : VarianceModel::pooled;
    std::ostringstream os;
    bool header = true;
    const bool both = o.task == "both";
    for (Task task : tasks_for(o.task)) {
        std::size_t n_correct = 0;
        std::size_t n_incorrect = 0;
        for (const auto& t : drop.kept)
            if (t.task == task)
                ++(t.label ? n_correct : n_incorrect);
        if (both && (n_correct < 2 || n_incorrect < 2)) {
            err << "skipping " << to_string(task) << ": " << n_incorrect << " incorrect and "
                << n_correct << " correct trial(s)\n";
            continue;
        }
        const auto results = feature_t_tests(drop.kept, task, variance);
        write_t_tests(os, task, results, header);
        header = false;
    }
    if (header)
        throw InputError("no task has at least two correct and two incorrect trials");
    outputs.add(o.out, os.str());
    outputs.commit();
    out << "wrote " << o.out << '\n';
    return 0;
}

int run_classify(const ClassifyOptions& o, std::ostream& out, std::ostream& err)
{
    if (o.runs == 0)
        throw InputError("--runs must be at least 1");
    PendingOutputs outputs;
    const Task task = parse_task(o.task);
    const bool text_features = o.features == "et+text";

    std::map<std::string, TextStats> stats;
    if (text_features) {
        if (o.boundaries.empty())
            throw InputError("--features et+text needs --boundaries");
        stats = text_stats(load_boundaries(read_input(outputs, o.boundaries)));
    }

    const DropResult drop = drop_empty_trials(parse_trial_features(read_input(outputs, o.trial_features)));
    if (drop.dropped != 0)
        err << "dropped " << drop.dropped << " trial(s) without fixations on the text\n";
    const FeatureMatrix matrix = build_feature_matrix(drop.kept, task, text_features ? &stats : nullptr);
    if (matrix.size() == 0)
        throw InputError("no " + std::string(to_string(task)) + " trials to classify");

    std::vector<Model> models;
    for (const auto& name : o.models)
        models.push_back(parse_model(name));

    ModelSettings settings;
    settings.forest.trees = o.trees;
    settings.forest.jobs = resolve_jobs(o.jobs);
    const auto reports = run_experiment(matrix, models, o.runs, o.seed, settings);

    for (const auto& r : reports)
        if (!r.all_converged)
            err << "warning: " << to_string(r.model) << " did not converge in every run\n";
    outputs.add(o.out, render([&](std::ostream& os) {
                    write_eval_reports(os, to_string(task), o.features, reports);
                }));
    outputs.commit();

    TextTable table({"model", "accuracy", "weighted F1"});
    char acc[64];
    char f1[64];
    for (const auto& r : reports) {
        std::snprintf(acc, sizeof acc, "%.2f (%.2f)", r.accuracy_mean, r.accuracy_std);
        std::snprintf(f1, sizeof f1, "%.2f (%.2f)", r.f1_mean, r.f1_std);
        table.add_row({std::string(to_string(r.model)), acc, f1});
    }
    table.print(out);
    return 0;
}

int run_simulate(const SimulateOptions& o, std::ostream& out, std::ostream&)
{
    const SimulatedDataset ds = o.demo ? demo_dataset() : simulate_dataset(o.spec, o.seed);

    std::vector<TrialSamples> gaze;
    for (const auto& trial : ds.trials)
        gaze.push_back(TrialSamples{trial.trial_id, trial.samples});
    std::sort(gaze.begin(), gaze.end(),
              [](const auto& a, const auto& b) { return a.trial_id < b.trial_id; });

    PendingOutputs outputs;
    const fs::path dir(o.out_dir);
    outputs.add(dir / "gaze.csv", render([&](std::ostream& os) { write_gaze_log(os, gaze); }));
    outputs.add(dir / "trials.jsonl", render([&](std::ostream& os) { write_trial_meta(os, ds.trials); }));
    outputs.add(dir / "participants.jsonl",
                render([&](std::ostream& os) { write_participants(os, ds.participants); }));
    outputs.add(dir / "boundaries.jsonl",
                render([&](std::ostream& os) { write_boundaries(os, ds.layouts); }));
    outputs.add(dir / "ground_truth.csv",
                render([&](std::ostream& os) { write_ground_truth(os, ds.ground_truth); }));
    outputs.commit();
    out << ds.participants.size() << " participant(s), " << ds.trials.size() << " trial(s) written to "
        << o.out_dir << '\n';
    return 0;
}

std::string fixed(const std::optional<double>& v, int decimals)
{
    if (!v)
        return "-";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, *v);
    return buf;
}

void report_comparison(PendingOutputs& outputs, const std::string& path, std::ostream& os)
{
    const auto rows = parse_comparison(read_input(outputs, path));
    os << "Dataset comparison per text\n\n";
    TextTable table({"language", "text", "TRT a", "TRT b", "nfix a", "nfix b", "rho", "words"});
    for (const auto& r : rows)
        table.add_row({r.language, r.text_id, fixed(r.trt_a, 1), fixed(r.trt_b, 1), fixed(r.nfix_a, 2),
                       fixed(r.nfix_b, 2), fixed(r.rho, 2), std::to_string(r.words_correlated)});
    table.print(os);
}

void report_ttests(PendingOutputs& outputs, const std::string& path, std::ostream& os)
{
    const CsvTable csv = CsvTable::parse(read_input(outputs, path));
    const std::size_t task = csv.require("task");
    const std::size_t feature = csv.require("feature");
    const std::size_t mean1 = csv.require("mean1");
    const std::size_t mean2 = csv.require("mean2");
    const std::size_t p = csv.require("p");

    std::vector<std::string> tasks;
    std::vector<std::string> features;
    std::map<std::pair<std::string, std::string>, const CsvTable::Row*> cells;
    for (const auto& row : csv.rows()) {
        const std::string& t = row.fields[task];
        const std::string& f = row.fields[feature];
        if (std::find(tasks.begin(), tasks.end(), t) == tasks.end())
            tasks.push_back(t);
        if (std::find(features.begin(), features.end(), f) == features.end())
            features.push_back(f);
        cells[{t, f}] = &row;
    }

    os << "Independent t-tests, incorrect (mu1) vs correct (mu2) trials\n\n";
    std::vector<std::string> header{"feature"};
    for (const auto& t : tasks)
        for (const char* col : {" mu1", " mu2", " p"})
            header.push_back(t + col);
    TextTable table(header);
    char buf[64];
    for (const auto& f : features) {
        std::vector<std::string> line{f};
        for (const auto& t : tasks) {
            const auto it = cells.find({t, f});
            if (it == cells.end()) {
                line.insert(line.end(), {"-", "-", "-"});
                continue;
            }
            const auto& row = *it->second;
            line.push_back(fixed(csv.optional_number(row, mean1), 2));
            line.push_back(fixed(csv.optional_number(row, mean2), 2));
            const auto pv = csv.optional_number(row, p);
            if (pv) {
                std::snprintf(buf, sizeof buf, "%.3g", *pv);
                line.push_back(buf);
            } else {
                line.push_back("-");
            }
        }
        table.add_row(std::move(line));
    }
    table.print(os);
}

void report_evals(PendingOutputs& outputs, const std::vector<std::string>& paths, std::ostream& os)
{
    using Group = std::pair<std::string, std::string>;  // task, features
    std::vector<Group> groups;
    std::vector<std::string> models;
    std::map<std::pair<Group, std::string>, std::pair<std::string, std::string>> cells;
    char acc[64];
    char f1[64];
    for (const auto& path : paths) {
        const CsvTable csv = CsvTable::parse(read_input(outputs, path));
        const std::size_t task = csv.require("task");
        const std::size_t features = csv.require("features");
        const std::size_t model = csv.require("model");
        const std::size_t am = csv.require("acc_mean");
        const std::size_t as = csv.require("acc_std");
        const std::size_t fm = csv.require("f1_mean");
        const std::size_t fs_ = csv.require("f1_std");
        for (const auto& row : csv.rows()) {
            const Group g{row.fields[task], row.fields[features]};
            if (std::find(groups.begin(), groups.end(), g) == groups.end())
                groups.push_back(g);
            const std::string& m = row.fields[model];
            if (std::find(models.begin(), models.end(), m) == models.end())
                models.push_back(m);
            std::snprintf(acc, sizeof acc, "%.2f (%.2f)", csv.number(row, am), csv.number(row, as));
            std::snprintf(f1, sizeof f1, "%.2f (%.2f)", csv.number(row, fm), csv.number(row, fs_));
            cells[{g, m}] = {acc, f1};
        }
    }
    std::sort(groups.begin(), groups.end());

    os << "Answer-correctness classification, mean (std) over runs\n\n";
    std::vector<std::string> header{"model"};
    for (const auto& [task, features] : groups) {
        header.push_back(task + " " + features + " Acc");
        header.push_back(task + " " + features + " F1");
    }
    TextTable table(header);
    for (const auto& m : models) {
        std::vector<std::string> line{m};
        for (const auto& g : groups) {
            const auto it = cells.find({g, m});
            line.push_back(it == cells.end() ? "-" : it->second.first);
            line.push_back(it == cells.end() ? "-" : it->second.second);
        }
        table.add_row(std::move(line));
    }
    table.print(os);
}

int run_report(const ReportOptions& o, std::ostream& out, std::ostream&)
{
    if (o.comparison.empty() && o.ttests.empty() && o.evals.empty())
        throw InputError("report needs at least one of --comparison, --ttests, --eval");
    PendingOutputs outputs;
    std::ostringstream os;
    bool first = true;
    auto section = [&] {
        if (!first)
            os << '\n';
        first = false;
    };
    if (!o.comparison.empty()) {
        section();
        report_comparison(outputs, o.comparison, os);
    }
    if (!o.ttests.empty()) {
        section();
        report_ttests(outputs, o.ttests, os);
    }
    if (!o.evals.empty()) {
        section();
        report_evals(outputs, o.evals, os);
    }
    if (o.out.empty()) {
        out << os.str();
    } else {
        outputs.add(o.out, os.str());
        outputs.commit();
    }
    return 0;
}

void add_fixation_flags(CLI::App& cmd, FixationParams& p)
{
    cmd.add_option("--window-ms", p.window_ms, "Merge window w in ms")->capture_default_str();
    cmd.add_option("--radius-px", p.radius_px, "Merge radius r in px")->capture_default_str();
    cmd.add_option("--bounds-tolerance-px", p.bounds_tolerance_px,
                   "Allowed distance outside the stimulus frame")
        ->capture_default_str();
    cmd.add_option("--min-fix-ms", p.min_fix_ms, "Minimum fixation duration")->capture_default_str();
    const std::map<std::string, FixationTime> times{{"last", FixationTime::last_sample},
                                                    {"anchor", FixationTime::anchor}};
    cmd.add_option("--fixation-time", p.timestamp, "Timestamp source: last or anchor")
        ->transform(CLI::CheckedTransformer(times, CLI::ignore_case))
        ->default_str("last");
}

const auto is_task = CLI::IsMember({"is", "nr"}, CLI::ignore_case);

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app("Webcam eye-tracking pipeline: fixations, word features, statistics, classifiers",
                 "gazeflow");
    app.set_config("--config", "", "Read options from a TOML or INI run file");
    app.require_subcommand(1);

    FilterOptions filter;
    auto* c_filter = app.add_subcommand("filter", "Reject participants that fail the quality gates");
    c_filter->add_option("--participants", filter.participants, "Participant metadata (JSON lines)")
        ->required()
        ->check(CLI::ExistingFile);
    c_filter->add_option("--trials", filter.trials, "Trial metadata (JSON lines)")
        ->required()
        ->check(CLI::ExistingFile);
    c_filter->add_option("--gaze", filter.gaze, "Gaze log (CSV or JSON lines)")
        ->required()
        ->check(CLI::ExistingFile);
    c_filter->add_option("--out-dir", filter.out_dir, "Output directory")->required();
    c_filter->add_option("--min-fraction-correct", filter.thresholds.min_fraction_correct)
        ->capture_default_str();
    c_filter->add_option("--min-sample-rate-hz", filter.thresholds.min_sample_rate_hz)
        ->capture_default_str();
    c_filter->add_option("--min-accuracy-pct", filter.thresholds.min_accuracy_pct_exclusive)
        ->capture_default_str();
    c_filter->add_option("--min-screen-w", filter.thresholds.min_screen_w)->capture_default_str();
    c_filter->add_option("--min-screen-h", filter.thresholds.min_screen_h)->capture_default_str();

    FixationOptions fix;
    auto* c_fix = app.add_subcommand("fixations", "Detect fixations per trial");
    c_fix->add_option("--trials", fix.trials, "Trial metadata (JSON lines)")
        ->required()
        ->check(CLI::ExistingFile);
    c_fix->add_option("--gaze", fix.gaze, "Gaze log (CSV or JSON lines)")
        ->required()
        ->check(CLI::ExistingFile);
    c_fix->add_option("--out", fix.out, "Fixation table (CSV)")->required();
    add_fixation_flags(*c_fix, fix.params);
    c_fix->add_option("--jobs", fix.jobs, "Worker threads (0: all cores)")->capture_default_str();

    FeatureOptions feat;
    auto* c_feat = app.add_subcommand("features", "Assign fixations to words and compute features");
    c_feat->add_option("--trials", feat.trials, "Trial metadata (JSON lines)")
        ->required()
        ->check(CLI::ExistingFile);
    c_feat->add_option("--fixations", feat.fixations, "Fixation table")
        ->required()
        ->check(CLI::ExistingFile);
    c_feat->add_option("--boundaries", feat.boundaries, "Word boundary file (JSON lines)")
        ->required()
        ->check(CLI::ExistingFile);
    c_feat->add_option("--participants", feat.participants,
                       "Keep only trials of these participants (e.g. filter output)")
        ->check(CLI::ExistingFile);
    c_feat->add_option("--out-dir", feat.out_dir, "Output directory")->required();
    c_feat->add_option("--horizontal-cap-px", feat.expansion.horizontal_cap_px)->capture_default_str();
    c_feat->add_option("--vertical-cap-px", feat.expansion.vertical_cap_px)->capture_default_str();
    c_feat->add_option("--jobs", feat.jobs, "Worker threads (0: all cores)")->capture_default_str();

    CompareOptions cmp;
    auto* c_cmp = app.add_subcommand("compare", "Compare word features of two datasets per text");
    c_cmp->add_option("--a", cmp.a, "Word features of dataset A")->required()->check(CLI::ExistingFile);
    c_cmp->add_option("--b", cmp.b, "Word features of dataset B")->required()->check(CLI::ExistingFile);
    c_cmp->add_option("--languages", cmp.languages, "CSV with text_id,language")
        ->check(CLI::ExistingFile);
    c_cmp->add_option("--out", cmp.out, "Comparison table (CSV)")->required();

    TTestOptions tt;
    auto* c_tt = app.add_subcommand("ttest", "t-tests of trial features, incorrect vs correct");
    c_tt->add_option("--trial-features", tt.trial_features, "Trial feature table")
        ->required()
        ->check(CLI::ExistingFile);
    c_tt->add_option("--task", tt.task, "is, nr or both")
        ->check(CLI::IsMember({"is", "nr", "both"}, CLI::ignore_case))
        ->capture_default_str();
    c_tt->add_flag("--welch", tt.welch, "Welch variance instead of pooled");
    c_tt->add_option("--out", tt.out, "t-test table (CSV)")->required();

    ClassifyOptions cls;
    auto* c_cls = app.add_subcommand("classify", "Predict answer correctness from trial features");
    c_cls->add_option("--trial-features", cls.trial_features, "Trial feature table")
        ->required()
        ->check(CLI::ExistingFile);
    c_cls->add_option("--task", cls.task, "is or nr")->required()->check(is_task);
    c_cls->add_option("--features", cls.features, "et or et+text")
        ->check(CLI::IsMember({"et", "et+text"}))
        ->capture_default_str();
    c_cls->add_option("--boundaries", cls.boundaries, "Word boundary file, for text features")
        ->check(CLI::ExistingFile);
    c_cls->add_option("--runs", cls.runs, "Number of seeds")->capture_default_str();
    c_cls->add_option("--seed", cls.seed, "First seed")->envname("GAZEFLOW_SEED")->capture_default_str();
    c_cls->add_option("--models", cls.models, "Comma-separated: random,logistic,forest")
        ->delimiter(',')
        ->capture_default_str();
    c_cls->add_option("--trees", cls.trees, "Trees per forest")->capture_default_str();
    c_cls->add_option("--jobs", cls.jobs, "Worker threads (0: all cores)")->capture_default_str();
    c_cls->add_option("--out", cls.out, "Evaluation table (CSV)")->required();

    SimulateOptions sim;
    auto* c_sim = app.add_subcommand("simulate", "Write a synthetic dataset with known dwell times");
    c_sim->add_option("--out-dir", sim.out_dir, "Output directory")->required();
    c_sim->add_flag("--demo", sim.demo, "Single-trial demo dataset");
    c_sim->add_option("--participants", sim.spec.participants)->capture_default_str();
    c_sim->add_option("--texts", sim.spec.texts)->capture_default_str();
    c_sim->add_option("--words", sim.spec.words_per_text)->capture_default_str();
    c_sim->add_option("--rate-hz", sim.spec.rate_hz)->capture_default_str();
    c_sim->add_option("--noise-px", sim.spec.noise_sigma_px)->capture_default_str();
    c_sim->add_option("--offset-px", sim.spec.accuracy_offset_px)->capture_default_str();
    c_sim->add_option("--seed", sim.seed)->envname("GAZEFLOW_SEED")->capture_default_str();

    ReportOptions rep;
    auto* c_rep = app.add_subcommand("report", "Summary tables from comparison, t-test and classifier outputs");
    c_rep->add_option("--comparison", rep.comparison, "Output of compare")->check(CLI::ExistingFile);
    c_rep->add_option("--ttests", rep.ttests, "Output of ttest")->check(CLI::ExistingFile);
    c_rep->add_option("--eval", rep.evals, "Outputs of classify (repeatable)")->check(CLI::ExistingFile);
    c_rep->add_option("--out", rep.out, "Write the report here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (c_filter->parsed())
            return run_filter(filter, out, err);
        if (c_fix->parsed())
            return run_fixations(fix, out, err);
        if (c_feat->parsed())
            return run_features(feat, out, err);
        if (c_cmp->parsed())
            return run_compare(cmp, out, err);
        if (c_tt->parsed())
            return run_ttest(tt, out, err);
        if (c_cls->parsed())
            return run_classify(cls, out, err);
        if (c_sim->parsed())
            return run_simulate(sim, out, err);
        if (c_rep->parsed())
            return run_report(rep, out, err);
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    } catch (const InternalError& e) {
        err << "internal error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return 2;
    }
    err << "internal error: no subcommand ran\n";
    return 2;
}

} // namespace gazeflow::cli
