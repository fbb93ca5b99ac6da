#include "gazeflow/classify.hpp"

#include "gazeflow/error.hpp"
#include "gazeflow/random.hpp"
#include "gazeflow/stats.hpp"
#include "gazeflow/table.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace gazeflow {

void FeatureMatrix::add_row(std::vector<std::optional<double>> row, int label, std::size_t source)
{
    if (!columns.empty() && row.size() != columns.size())
        throw InternalError("feature matrix: row width does not match the column count");
    if (label != 0 && label != 1)
        throw InputError("feature matrix: labels must be 0 or 1");
    rows.push_back(std::move(row));
    labels.push_back(label);
    source_rows.push_back(source);
}

std::map<std::string, TextStats> text_stats(std::span<const TextLayout> layouts)
{
    std::map<std::string, TextStats> out;
    for (const auto& layout : layouts) {
        TextStats s;
        s.token_count = layout.words.size();
        double total = 0.0;
        for (const auto& w : layout.words)
            total += static_cast<double>(word_length(w.text));
        s.avg_token_length = s.token_count ? total / static_cast<double>(s.token_count) : 0.0;
        out.emplace(layout.text_id, s);
    }
    return out;
}

FeatureMatrix build_feature_matrix(std::span<const TrialFeatures> trials, Task task,
                                   const std::map<std::string, TextStats>* text)
{
    FeatureMatrix m;
    m.columns = {"f1_fix_on_target", "f2_total_fixations", "f3_target_total_ratio",
                 "f4_trt_text",      "f5_trt_target",      "f6_trt_target_text_ratio",
                 "avg_trt_in_target", "avg_trt_out_target"};
    if (text) {
        m.columns.push_back("token_count");
        m.columns.push_back("avg_token_length");
    }
    for (const auto& t : trials) {
        if (t.task != task)
            continue;
        std::vector<std::optional<double>> row = {
            t.f1_fix_on_target,  t.f2_total_fixations,       t.f3_target_total_ratio,
            t.f4_trt_text_ms,    t.f5_trt_target_ms,         t.f6_trt_target_text_ratio,
            t.avg_word_trt_in_target_ms, t.avg_word_trt_out_target_ms};
        if (text) {
            auto it = text->find(t.text_id);
            if (it == text->end())
                throw InputError("no text statistics for text '" + t.text_id + "'");
            row.emplace_back(static_cast<double>(it->second.token_count));
            row.emplace_back(it->second.avg_token_length);
        }
        m.add_row(std::move(row), t.label ? 1 : 0, m.size());
    }
    return m;
}

namespace {

FeatureMatrix subset(const FeatureMatrix& m, std::span<const std::size_t> idx)
{
    FeatureMatrix out;
    out.columns = m.columns;
    for (std::size_t i : idx)
        out.add_row(m.rows[i], m.labels[i], m.source_rows[i]);
    return out;
}

std::optional<TrainTestSplit> try_split(const FeatureMatrix& matrix, std::uint64_t seed)
{
    const std::size_t n = matrix.size();
    Rng rng(seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(std::span<std::size_t>(order));

    const std::size_t n_test = (n + 4) / 5;
    std::span<const std::size_t> test_idx(order.data(), n_test);
    std::span<const std::size_t> train_idx(order.data() + n_test, n - n_test);

    std::vector<std::size_t> by_class[2];
    for (std::size_t i : train_idx)
        by_class[matrix.labels[i]].push_back(i);
    if (by_class[0].empty() || by_class[1].empty())
        return std::nullopt;

    std::vector<std::size_t> train(train_idx.begin(), train_idx.end());
    const int minority = by_class[0].size() < by_class[1].size() ? 0 : 1;
    const auto& pool = by_class[minority];
    const std::size_t deficit = by_class[1 - minority].size() - pool.size();
    for (std::size_t k = 0; k < deficit; ++k)
        train.push_back(pool[rng.below(pool.size())]);

    TrainTestSplit split;
    split.train = subset(matrix, train);
    split.test = subset(matrix, test_idx);
    split.seed_used = seed;
    return split;
}

} // namespace

TrainTestSplit split_and_balance(const FeatureMatrix& matrix, std::uint64_t seed)
{
    const auto ones = static_cast<std::size_t>(std::count(matrix.labels.begin(), matrix.labels.end(), 1));
    if (ones == 0 || ones == matrix.size())
        throw InputError("split: both classes must be present (" + std::to_string(ones) +
                         " positive of " + std::to_string(matrix.size()) + ")");
    if (auto split = try_split(matrix, seed))
        return std::move(*split);
    if (auto split = try_split(matrix, seed + 1))
        return std::move(*split);
    throw InputError("split: a class is missing from the training part for seeds " +
                     std::to_string(seed) + " and " + std::to_string(seed + 1));
}

Standardizer Standardizer::fit(const FeatureMatrix& train)
{
    Standardizer s;
    const std::size_t d = train.columns.size();
    s.medians_.assign(d, 0.0);
    s.means_.assign(d, 0.0);
    s.scales_.assign(d, 1.0);
    for (std::size_t c = 0; c < d; ++c) {
        std::vector<double> present;
        for (const auto& row : train.rows)
            if (row[c])
                present.push_back(*row[c]);
        if (!present.empty())
            s.medians_[c] = quartiles(present).median;
        std::vector<double> filled;
        filled.reserve(train.size());
        for (const auto& row : train.rows)
            filled.push_back(row[c].value_or(s.medians_[c]));
        if (filled.empty())
            continue;
        double mean = 0.0;
        for (double v : filled)
            mean += v;
        mean /= static_cast<double>(filled.size());
        double ss = 0.0;
        for (double v : filled)
            ss += (v - mean) * (v - mean);
        const double sd = std::sqrt(ss / static_cast<double>(filled.size()));
        s.means_[c] = mean;
        s.scales_[c] = sd > 0.0 ? sd : 1.0;
    }
    return s;
}

DenseMatrix Standardizer::apply(const FeatureMatrix& m) const
{
    const std::size_t d = medians_.size();
    if (m.columns.size() != d)
        throw InternalError("standardizer: column count mismatch");
    DenseMatrix out(m.size(), d);
    for (std::size_t r = 0; r < m.size(); ++r)
        for (std::size_t c = 0; c < d; ++c)
            out(r, c) = (m.rows[r][c].value_or(medians_[c]) - means_[c]) / scales_[c];
    return out;
}

std::string_view to_string(Model model)
{
    switch (model) {
    case Model::random:
        return "random";
    case Model::logistic:
        return "logistic";
    case Model::forest:
        return "forest";
    }
    return "unknown";
}

Model parse_model(std::string_view name)
{
    if (name == "random")
        return Model::random;
    if (name == "logistic")
        return Model::logistic;
    if (name == "forest")
        return Model::forest;
    throw InputError("unknown model '" + std::string(name) + "'");
}

double accuracy_pct(std::span<const int> predictions, std::span<const int> labels)
{
    if (predictions.size() != labels.size() || labels.empty())
        throw InputError("accuracy: empty or mismatched prediction/label vectors");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < labels.size(); ++i)
        hits += predictions[i] == labels[i];
    return 100.0 * static_cast<double>(hits) / static_cast<double>(labels.size());
}

double weighted_f1(std::span<const int> predictions, std::span<const int> labels)
{
    if (predictions.size() != labels.size() || labels.empty())
        throw InputError("weighted F1: empty or mismatched prediction/label vectors");
    double total = 0.0;
    for (int c = 0; c <= 1; ++c) {
        double tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            const bool pred = predictions[i] == c;
            const bool actual = labels[i] == c;
            tp += pred && actual;
            fp += pred && !actual;
            fn += !pred && actual;
        }
        const double support = tp + fn;
        if (support == 0.0)
            continue;
        const double precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
        const double recall = tp / support;
        const double f1 =
            precision + recall > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
        total += f1 * support;
    }
    return 100.0 * total / static_cast<double>(labels.size());
}

RunScore train_eval(const TrainTestSplit& split, Model model, std::uint64_t seed,
                    const ModelSettings& settings)
{
    if (split.train.size() == 0 || split.test.size() == 0)
        throw InputError("train_eval: empty train or test part");
    const Standardizer scaler = Standardizer::fit(split.train);
    const DenseMatrix train = scaler.apply(split.train);
    const DenseMatrix test = scaler.apply(split.test);

    RunScore score;
    score.model = model;
    std::vector<int> predictions(test.rows());
    switch (model) {
    case Model::random: {
        Rng rng(mix_seed(seed, 101));
        for (auto& p : predictions)
            p = static_cast<int>(rng.below(2));
        break;
    }
    case Model::logistic: {
        LogisticRegression lr;
        score.converged = lr.fit(train, split.train.labels, settings.logistic);
        for (std::size_t i = 0; i < test.rows(); ++i)
            predictions[i] = lr.predict(test.row(i));
        break;
    }
    case Model::forest: {
        RandomForest forest;
        forest.fit(train, split.train.labels, settings.forest, mix_seed(seed, 202));
        for (std::size_t i = 0; i < test.rows(); ++i)
            predictions[i] = forest.predict(test.row(i));
        break;
    }
    }
    score.accuracy = accuracy_pct(predictions, split.test.labels);
    score.weighted_f1 = weighted_f1(predictions, split.test.labels);
    return score;
}

std::vector<EvalReport> run_experiment(const FeatureMatrix& matrix, std::span<const Model> models,
                                       std::size_t runs, std::uint64_t seed0,
                                       const ModelSettings& settings)
{
    if (runs == 0)
        throw InputError("run_experiment: need at least one run");
    std::vector<EvalReport> reports;
    for (Model m : models) {
        EvalReport r;
        r.model = m;
        reports.push_back(r);
    }
    for (std::size_t k = 0; k < runs; ++k) {
        const std::uint64_t seed = seed0 + k;
        const TrainTestSplit split = split_and_balance(matrix, seed);
        for (auto& report : reports) {
            const RunScore s = train_eval(split, report.model, seed, settings);
            report.seeds.push_back(seed);
            report.accuracies.push_back(s.accuracy);
            report.f1s.push_back(s.weighted_f1);
            report.all_converged = report.all_converged && s.converged;
        }
    }
    for (auto& report : reports) {
        const Moments acc = moments(report.accuracies);
        const Moments f1 = moments(report.f1s);
        report.accuracy_mean = acc.mean;
        report.accuracy_std = acc.std;
        report.f1_mean = f1.mean;
        report.f1_std = f1.std;
    }
    return reports;
}

void write_eval_reports(std::ostream& out, std::string_view task, std::string_view features,
                        std::span<const EvalReport> reports, bool header)
{
    CsvWriter w(out);
    if (header)
        w.header({"task", "features", "model", "acc_mean", "acc_std", "f1_mean", "f1_std", "runs",
                  "converged"});
    for (const auto& r : reports) {
        w.field(task)
            .field(features)
            .field(to_string(r.model))
            .field(r.accuracy_mean)
            .field(r.accuracy_std)
            .field(r.f1_mean)
            .field(r.f1_std)
            .field(r.seeds.size())
            .field(r.all_converged);
        w.end_row();
    }
}

} // namespace gazeflow
