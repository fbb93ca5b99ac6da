#include "gazeflow/simulate.hpp"

#include "gazeflow/error.hpp"
#include "gazeflow/random.hpp"
#include "gazeflow/table.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cmath>
#include <numbers>
#include <ostream>

namespace gazeflow {

void DwellSchedule::validate() const
{
    if (!(rate_hz > 0.0) || !std::isfinite(rate_hz))
        throw InputError("simulate: rate must be positive");
    if (!(noise_sigma_px >= 0.0))
        throw InputError("simulate: noise sigma must be non-negative");
    if (!(dropout >= 0.0 && dropout < 1.0))
        throw InputError("simulate: dropout must lie in [0, 1)");
    for (const auto& d : dwells)
        if (!(d.dwell_ms > 0.0) || !std::isfinite(d.dwell_ms))
            throw InputError("simulate: dwell durations must be positive");
}

SimulatedTrial generate(const DwellSchedule& schedule, std::span<const WordBox> boxes,
                        const StimulusFrame& frame, std::uint64_t seed)
{
    schedule.validate();
    std::map<int, const WordBox*> by_token;
    for (const auto& b : boxes)
        by_token[b.token_index] = &b;

    Rng rng(seed);
    const double period = 1000.0 / schedule.rate_hz;
    SimulatedTrial out;
    double start = 0.0;
    for (const auto& dwell : schedule.dwells) {
        auto it = by_token.find(dwell.token_index);
        if (it == by_token.end())
            throw InputError("simulate: schedule references unknown token " +
                             std::to_string(dwell.token_index));
        const Box& raw = it->second->raw;
        const double cx = frame.origin_x + raw.x + 0.5 * raw.w;
        const double cy = frame.origin_y + raw.y + 0.5 * raw.h;
        for (std::size_t k = 0;; ++k) {
            const double offset = static_cast<double>(k) * period;
            if (offset >= dwell.dwell_ms)
                break;
            // Noise is drawn before the dropout decision so that dropout does
            // not shift the noise stream of the remaining samples.
            const double nx = schedule.noise_sigma_px > 0.0 ? rng.normal(0.0, schedule.noise_sigma_px) : 0.0;
            const double ny = schedule.noise_sigma_px > 0.0 ? rng.normal(0.0, schedule.noise_sigma_px) : 0.0;
            if (schedule.dropout > 0.0 && rng.bernoulli(schedule.dropout))
                continue;
            out.samples.push_back(GazeSample{start + offset, cx + nx, cy + ny});
        }
        out.scheduled_dwell_ms[dwell.token_index] += dwell.dwell_ms;
        start += dwell.dwell_ms;
    }
    out.duration_ms = start;
    return out;
}

std::vector<GazeSample> degrade(std::span<const GazeSample> samples, double offset_px,
                                std::uint64_t seed)
{
    if (!(offset_px >= 0.0))
        throw InputError("degrade: offset must be non-negative");
    std::vector<GazeSample> out(samples.begin(), samples.end());
    if (offset_px == 0.0)
        return out;
    Rng rng(seed);
    const double angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double dx = offset_px * std::cos(angle);
    const double dy = offset_px * std::sin(angle);
    for (auto& s : out) {
        s.x += dx;
        s.y += dy;
    }
    return out;
}

std::vector<WordBox> layout_words(std::span<const std::string> words, const LayoutStyle& style)
{
    std::vector<WordBox> boxes;
    double x = style.margin_x_px;
    double line_top = style.margin_y_px;
    int line = 0;
    const double right_limit = style.page_width_px - style.margin_x_px;
    const double inset = 0.5 * (style.line_height_px - style.box_height_px);
    for (std::size_t i = 0; i < words.size(); ++i) {
        const double w = style.char_width_px * static_cast<double>(std::max<std::size_t>(1, words[i].size()));
        if (x + w > right_limit && x > style.margin_x_px) {
            x = style.margin_x_px;
            line_top += style.line_height_px;
            ++line;
        }
        if (line_top + style.line_height_px > style.page_height_px)
            throw InputError("layout: text does not fit on a " +
                             std::to_string(static_cast<int>(style.page_width_px)) + "x" +
                             std::to_string(static_cast<int>(style.page_height_px)) + " page");
        WordBox b;
        b.token_index = static_cast<int>(i);
        b.text = words[i];
        b.raw = Box{x, line_top + inset, w, style.box_height_px};
        b.box = b.raw;
        b.line_index = line;
        boxes.push_back(std::move(b));
        x += w + style.word_spacing_px;
    }
    return boxes;
}

DwellSchedule reading_schedule(std::span<const WordBox> boxes, const ReadingModel& model,
                               std::uint64_t seed)
{
    Rng rng(seed);
    DwellSchedule schedule;
    auto dwell_for = [&](const WordBox& b) {
        double d = model.base_ms + model.per_char_ms * static_cast<double>(word_length(b.text));
        if (b.is_target)
            d *= model.target_gain;
        if (model.jitter_ms > 0.0)
            d += rng.uniform(-model.jitter_ms, model.jitter_ms);
        return std::max(d, model.min_dwell_ms);
    };
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        schedule.dwells.push_back(Dwell{boxes[i].token_index, dwell_for(boxes[i])});
        if (i > 0 && model.regression_prob > 0.0 && rng.bernoulli(model.regression_prob)) {
            const std::size_t back = 1 + rng.below(std::min<std::size_t>(3, i));
            schedule.dwells.push_back(Dwell{boxes[i - back].token_index, 0.5 * dwell_for(boxes[i - back])});
        }
    }
    return schedule;
}

namespace {

const char* const vocabulary[] = {
    "a",          "an",        "the",        "of",         "in",        "on",
    "to",         "is",        "was",        "by",         "and",       "for",
    "city",       "river",     "north",      "early",      "first",     "water",
    "people",     "century",   "region",     "several",    "between",   "during",
    "language",   "building",  "important",  "population", "government", "university",
    "across",     "famous",    "small",      "large",      "known",     "later",
    "trade",      "empire",    "bridge",     "harbour",    "festival",  "mountain",
    "historical", "settlement", "agriculture", "development", "independence", "architecture",
    "its",        "from",      "were",       "this",       "which",     "also",
    "old",        "new",       "main",       "part",       "area",      "time",
};

std::vector<std::string> random_text(Rng& rng, std::size_t n)
{
    constexpr std::size_t size = sizeof(vocabulary) / sizeof(vocabulary[0]);
    std::vector<std::string> words;
    for (std::size_t i = 0; i < n; ++i)
        words.emplace_back(vocabulary[rng.below(size)]);
    if (!words.empty()) {
        words.front()[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(words.front()[0])));
        words.back() += ".";
    }
    return words;
}

TrialRecord make_trial(const std::string& pid, const TextLayout& layout, Task task,
                       const StimulusFrame& frame, bool correct, const SimulatedTrial& sim)
{
    TrialRecord t;
    t.trial_id = pid + ":" + layout.text_id;
    t.participant_id = pid;
    t.text_id = layout.text_id;
    t.task = task;
    t.frame = frame;
    t.samples = sim.samples;
    t.question_id = layout.spans.empty() ? std::string() : layout.spans.front().question_id;
    t.answered_correctly = correct;
    t.trial_duration_ms = sim.duration_ms + 2500.0;
    return t;
}

void add_truth(SimulatedDataset& ds, const std::string& trial_id, const SimulatedTrial& sim)
{
    for (const auto& [token, dwell] : sim.scheduled_dwell_ms)
        ds.ground_truth.push_back(GroundTruthRow{trial_id, token, dwell});
}

} // namespace

SimulatedDataset simulate_dataset(const DatasetSpec& spec, std::uint64_t seed)
{
    if (spec.participants == 0 || spec.texts == 0 || spec.words_per_text == 0)
        throw InputError("simulate: participants, texts and words must be positive");
    Rng rng(seed);
    SimulatedDataset ds;

    for (std::size_t k = 0; k < spec.texts; ++k) {
        TextLayout layout;
        layout.text_id = "text" + std::to_string(k + 1);
        layout.words = layout_words(random_text(rng, spec.words_per_text));
        const int n = static_cast<int>(layout.words.size());
        const int span_len = std::min(n, 3 + static_cast<int>(rng.below(4)));
        const int first = static_cast<int>(rng.below(static_cast<std::size_t>(n - span_len + 1)));
        layout.spans.push_back(TargetSpan{"a_Text" + std::to_string(k + 1) + "_1_qa_1", first,
                                          first + span_len - 1});
        ds.layouts.push_back(std::move(layout));
    }

    const StimulusFrame frame{320.0, 180.0, 1280.0, 720.0};
    for (std::size_t p = 0; p < spec.participants; ++p) {
        char pid_buf[16];
        std::snprintf(pid_buf, sizeof pid_buf, "p%03zu", p + 1);
        const std::string pid(pid_buf);
        const double rate = std::max(5.0, spec.rate_hz + rng.uniform(-3.0, 3.0));
        std::size_t n_correct = 0;
        double total_ms = 60000.0;

        for (std::size_t k = 0; k < ds.layouts.size(); ++k) {
            const TextLayout& layout = ds.layouts[k];
            const Task task = k % 2 == 0 ? Task::NR : Task::IS;
            const auto boxes = layout.with_targets(layout.spans.front().question_id);
            // Attentive information seekers dwell on the answer span and
            // answer correctly more often.
            const bool attentive = rng.bernoulli(0.7);
            ReadingModel model;
            model.jitter_ms = 40.0;
            model.regression_prob = 0.08;
            model.target_gain = task == Task::IS ? (attentive ? 1.8 : 0.9) : 1.0;
            model.per_char_ms = task == Task::IS ? 18.0 : 25.0;
            const bool correct = rng.bernoulli(attentive ? 0.9 : 0.45);
            n_correct += correct;

            DwellSchedule schedule = reading_schedule(boxes, model, rng());
            schedule.rate_hz = rate;
            schedule.noise_sigma_px = spec.noise_sigma_px;
            SimulatedTrial sim = generate(schedule, boxes, frame, rng());
            if (spec.accuracy_offset_px > 0.0)
                sim.samples = degrade(sim.samples, spec.accuracy_offset_px, rng());
            TrialRecord trial = make_trial(pid, layout, task, frame, correct, sim);
            total_ms += trial.trial_duration_ms;
            add_truth(ds, trial.trial_id, sim);
            ds.trials.push_back(std::move(trial));
        }

        ParticipantRecord rec;
        rec.participant_id = pid;
        rec.language = "en";
        rec.age = std::round(rng.uniform(19.0, 65.0));
        rec.reported_sample_rate_hz = rate;
        rec.validation_accuracy_pct = std::round(rng.uniform(40.0, 100.0));
        rec.screen_w = 1920;
        rec.screen_h = 1080;
        rec.fraction_correct = static_cast<double>(n_correct) / static_cast<double>(spec.texts);
        rec.total_experiment_ms = total_ms;
        ds.participants.push_back(std::move(rec));
    }
    return ds;
}

SimulatedDataset demo_dataset()
{
    const std::vector<std::string> words = {
        "The",   "river", "crosses", "the",       "old",     "city",  "from",
        "north", "to",    "south,",  "and",       "several", "stone", "bridges",
        "were",  "built", "during",  "the",       "fifteenth", "century."};
    SimulatedDataset ds;
    TextLayout layout;
    layout.text_id = "demo";
    layout.words = layout_words(words);
    layout.spans.push_back(TargetSpan{"a_Demo_1_qa_1", 11, 13});
    ds.layouts.push_back(layout);

    const StimulusFrame frame{320.0, 180.0, 1280.0, 720.0};
    const auto boxes = layout.with_targets("a_Demo_1_qa_1");
    ReadingModel model;
    model.jitter_ms = 60.0;
    model.regression_prob = 0.1;
    DwellSchedule schedule = reading_schedule(boxes, model, 7);
    schedule.rate_hz = 25.0;
    schedule.noise_sigma_px = 5.0;
    const SimulatedTrial sim = generate(schedule, boxes, frame, 11);

    TrialRecord trial = make_trial("p001", layout, Task::NR, frame, true, sim);
    add_truth(ds, trial.trial_id, sim);
    ds.trials.push_back(std::move(trial));

    ParticipantRecord p;
    p.participant_id = "p001";
    p.language = "en";
    p.age = 31;
    p.reported_sample_rate_hz = 25.0;
    p.validation_accuracy_pct = 80.0;
    p.screen_w = 1920;
    p.screen_h = 1080;
    p.fraction_correct = 1.0;
    p.total_experiment_ms = ds.trials.front().trial_duration_ms + 60000.0;
    ds.participants.push_back(std::move(p));
    return ds;
}

void write_ground_truth(std::ostream& out, std::span<const GroundTruthRow> rows)
{
    CsvWriter w(out);
    w.header({"trial_id", "token_index", "scheduled_dwell_ms"});
    for (const auto& r : rows) {
        w.field(r.trial_id).field(r.token_index).exact(r.scheduled_dwell_ms);
        w.end_row();
    }
}

} // namespace gazeflow
