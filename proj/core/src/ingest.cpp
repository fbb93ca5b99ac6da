#include "gazeflow/ingest.hpp"

#include "gazeflow/error.hpp"
#include "gazeflow/table.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>

namespace gazeflow {

using nlohmann::json;

std::size_t GazeLog::sample_count() const
{
    std::size_t n = 0;
    for (const auto& trial : trials)
        n += trial.samples.size();
    return n;
}

namespace {

std::string line_prefix(std::size_t line)
{
    return "line " + std::to_string(line) + ": ";
}

// Calls fn(line_no, object) for every non-blank line.
template <typename Fn>
void for_each_json_line(std::string_view source, Fn&& fn)
{
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < source.size()) {
        std::size_t end = source.find('\n', pos);
        if (end == std::string_view::npos)
            end = source.size();
        std::string_view line = source.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos)
            continue;
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            throw InputError(line_prefix(line_no) + "malformed JSON record: " + e.what());
        }
        if (!obj.is_object())
            throw InputError(line_prefix(line_no) + "expected a JSON object");
        fn(line_no, obj);
    }
}

const json& require_key(const json& obj, const char* key, std::size_t line)
{
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null())
        throw InputError(line_prefix(line) + "schema error: missing key '" + key + "'");
    return *it;
}

double json_number(const json& value, const char* key, std::size_t line)
{
    if (!value.is_number())
        throw InputError(line_prefix(line) + "key '" + key + "' must be a number");
    double v = value.get<double>();
    if (!std::isfinite(v))
        throw InputError(line_prefix(line) + "key '" + key + "' must be finite");
    return v;
}

std::string json_id(const json& value, const char* key, std::size_t line)
{
    if (value.is_string())
        return value.get<std::string>();
    if (value.is_number_integer())
        return std::to_string(value.get<long long>());
    throw InputError(line_prefix(line) + "key '" + key + "' must be a string or integer id");
}

std::optional<double> optional_number(const json& obj, const char* key, std::size_t line)
{
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null())
        return std::nullopt;
    return json_number(*it, key, line);
}

struct RawRow {
    std::size_t order = 0;
    GazeSample sample;
};

GazeLog group_rows(std::map<std::string, std::vector<RawRow>> grouped, std::size_t rows)
{
    GazeLog log;
    log.rows = rows;
    for (auto& [trial_id, raw] : grouped) {
        bool sorted = std::is_sorted(raw.begin(), raw.end(), [](const RawRow& a, const RawRow& b) {
            return a.sample.t < b.sample.t;
        });
        if (!sorted)
            ++log.reordered_trials;
        // Stable on file order, so the last of equal timestamps is the latest row.
        std::stable_sort(raw.begin(), raw.end(),
                         [](const RawRow& a, const RawRow& b) { return a.sample.t < b.sample.t; });
        TrialSamples trial{trial_id, {}};
        trial.samples.reserve(raw.size());
        for (std::size_t i = 0; i < raw.size(); ++i) {
            if (i + 1 < raw.size() && raw[i + 1].sample.t == raw[i].sample.t) {
                ++log.duplicates_collapsed;
                continue;
            }
            trial.samples.push_back(raw[i].sample);
        }
        log.trials.push_back(std::move(trial));
    }
    return log;
}

} // namespace

GazeLog parse_gaze_log(std::string_view source, GazeFormat format)
{
    std::map<std::string, std::vector<RawRow>> grouped;
    std::size_t rows = 0;

    auto add = [&](std::string trial_id, GazeSample s, std::size_t line) {
        if (s.t < 0.0)
            throw InputError(line_prefix(line) + "negative timestamp");
        grouped[std::move(trial_id)].push_back(RawRow{rows, s});
        ++rows;
    };

    if (format == GazeFormat::csv) {
        CsvTable table = CsvTable::parse(source);
        if (table.empty())
            return {};
        const std::size_t c_id = table.require("trial_id");
        const std::size_t c_t = table.require("t_ms");
        const std::size_t c_x = table.require("x_px");
        const std::size_t c_y = table.require("y_px");
        for (const auto& row : table.rows()) {
            if (row.fields[c_id].empty())
                throw InputError(line_prefix(row.line) + "empty trial_id");
            add(row.fields[c_id],
                GazeSample{table.number(row, c_t), table.number(row, c_x), table.number(row, c_y)},
                row.line);
        }
    } else {
        for_each_json_line(source, [&](std::size_t line, const json& obj) {
            std::string id = json_id(require_key(obj, "trial_id", line), "trial_id", line);
            GazeSample s{json_number(require_key(obj, "t_ms", line), "t_ms", line),
                         json_number(require_key(obj, "x_px", line), "x_px", line),
                         json_number(require_key(obj, "y_px", line), "y_px", line)};
            add(std::move(id), s, line);
        });
    }
    return group_rows(std::move(grouped), rows);
}

void write_gaze_log(std::ostream& out, std::span<const TrialSamples> trials)
{
    CsvWriter w(out);
    w.header({"trial_id", "t_ms", "x_px", "y_px"});
    for (const auto& trial : trials) {
        for (const auto& s : trial.samples) {
            w.field(trial.trial_id).exact(s.t).exact(s.x).exact(s.y);
            w.end_row();
        }
    }
}

std::vector<TrialRecord> parse_trial_meta(std::string_view source, const KnownIds& known)
{
    std::vector<TrialRecord> trials;
    std::set<std::string> seen;
    for_each_json_line(source, [&](std::size_t line, const json& obj) {
        TrialRecord t;
        t.participant_id = json_id(require_key(obj, "participant_id", line), "participant_id", line);
        t.text_id = json_id(require_key(obj, "text_id", line), "text_id", line);
        const json& task = require_key(obj, "task", line);
        if (!task.is_string())
            throw InputError(line_prefix(line) + "key 'task' must be a string");
        try {
            t.task = parse_task(task.get<std::string>());
        } catch (const InputError& e) {
            throw InputError(line_prefix(line) + e.what());
        }
        const json& frame = require_key(obj, "frame", line);
        if (!frame.is_object())
            throw InputError(line_prefix(line) + "key 'frame' must be an object {x,y,w,h}");
        t.frame.origin_x = json_number(require_key(frame, "x", line), "frame.x", line);
        t.frame.origin_y = json_number(require_key(frame, "y", line), "frame.y", line);
        t.frame.width = json_number(require_key(frame, "w", line), "frame.w", line);
        t.frame.height = json_number(require_key(frame, "h", line), "frame.h", line);
        if (!t.frame.valid())
            throw InputError(line_prefix(line) + "frame width and height must be positive");
        t.question_id = json_id(require_key(obj, "question_id", line), "question_id", line);
        const json& correct = require_key(obj, "correct", line);
        if (correct.is_boolean())
            t.answered_correctly = correct.get<bool>();
        else if (correct.is_number_integer() && (correct == 0 || correct == 1))
            t.answered_correctly = correct.get<int>() == 1;
        else
            throw InputError(line_prefix(line) + "key 'correct' must be a boolean");
        t.trial_duration_ms = json_number(require_key(obj, "trial_ms", line), "trial_ms", line);
        if (t.trial_duration_ms < 0.0)
            throw InputError(line_prefix(line) + "trial_ms must be non-negative");

        auto id_it = obj.find("trial_id");
        t.trial_id = (id_it != obj.end() && !id_it->is_null())
                         ? json_id(*id_it, "trial_id", line)
                         : t.participant_id + ":" + t.text_id;

        if (known.participants && !known.participants->contains(t.participant_id))
            throw InputError(line_prefix(line) + "trial '" + t.trial_id +
                             "' references unknown participant '" + t.participant_id + "'");
        if (known.texts && !known.texts->contains(t.text_id))
            throw InputError(line_prefix(line) + "trial '" + t.trial_id +
                             "' references unknown text '" + t.text_id + "'");
        if (!seen.insert(t.trial_id).second)
            throw InputError(line_prefix(line) + "duplicate trial_id '" + t.trial_id + "'");
        trials.push_back(std::move(t));
    });
    return trials;
}

void write_trial_meta(std::ostream& out, std::span<const TrialRecord> trials)
{
    for (const auto& t : trials) {
        json obj = json::object();
        obj["trial_id"] = t.trial_id;
        obj["participant_id"] = t.participant_id;
        obj["text_id"] = t.text_id;
        obj["task"] = std::string(to_string(t.task));
        obj["frame"] = {{"x", t.frame.origin_x},
                        {"y", t.frame.origin_y},
                        {"w", t.frame.width},
                        {"h", t.frame.height}};
        obj["question_id"] = t.question_id;
        obj["correct"] = t.answered_correctly;
        obj["trial_ms"] = t.trial_duration_ms;
        out << obj.dump() << '\n';
    }
}

std::vector<ParticipantRecord> parse_participants(std::string_view source)
{
    std::vector<ParticipantRecord> out;
    std::set<std::string> seen;
    for_each_json_line(source, [&](std::size_t line, const json& obj) {
        ParticipantRecord p;
        p.participant_id = json_id(require_key(obj, "id", line), "id", line);
        if (!seen.insert(p.participant_id).second)
            throw InputError(line_prefix(line) + "duplicate participant id '" + p.participant_id + "'");
        if (auto it = obj.find("language"); it != obj.end() && !it->is_null()) {
            if (!it->is_string())
                throw InputError(line_prefix(line) + "key 'language' must be a string");
            p.language = it->get<std::string>();
        }
        p.age = optional_number(obj, "age", line);
        p.reported_sample_rate_hz = optional_number(obj, "sample_rate_hz", line);
        p.validation_accuracy_pct = optional_number(obj, "accuracy_pct", line);
        if (auto w = optional_number(obj, "screen_w", line))
            p.screen_w = static_cast<int>(std::lround(*w));
        if (auto h = optional_number(obj, "screen_h", line))
            p.screen_h = static_cast<int>(std::lround(*h));
        p.fraction_correct = optional_number(obj, "fraction_correct", line);
        p.total_experiment_ms = optional_number(obj, "total_ms", line);

        if (p.validation_accuracy_pct &&
            (*p.validation_accuracy_pct < 0.0 || *p.validation_accuracy_pct > 100.0))
            throw InputError(line_prefix(line) + "accuracy_pct must lie in [0,100]");
        if (p.fraction_correct && (*p.fraction_correct < 0.0 || *p.fraction_correct > 1.0))
            throw InputError(line_prefix(line) + "fraction_correct must lie in [0,1]");
        if (p.reported_sample_rate_hz && *p.reported_sample_rate_hz < 0.0)
            throw InputError(line_prefix(line) + "sample_rate_hz must be non-negative");
        out.push_back(std::move(p));
    });
    return out;
}

void write_participants(std::ostream& out, std::span<const ParticipantRecord> participants)
{
    for (const auto& p : participants) {
        json obj = json::object();
        obj["id"] = p.participant_id;
        auto put = [&](const char* key, const auto& value) {
            if (value)
                obj[key] = *value;
            else
                obj[key] = nullptr;
        };
        put("language", p.language);
        put("age", p.age);
        put("sample_rate_hz", p.reported_sample_rate_hz);
        put("accuracy_pct", p.validation_accuracy_pct);
        put("screen_w", p.screen_w);
        put("screen_h", p.screen_h);
        put("fraction_correct", p.fraction_correct);
        put("total_ms", p.total_experiment_ms);
        out << obj.dump() << '\n';
    }
}

AttachResult attach_samples(std::vector<TrialRecord> trials, const GazeLog& log)
{
    AttachResult result;
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < trials.size(); ++i)
        index.emplace(trials[i].trial_id, i);

    for (const auto& group : log.trials) {
        auto it = index.find(group.trial_id);
        if (it == index.end()) {
            result.orphan_samples += group.samples.size();
            ++result.orphan_trial_ids;
            continue;
        }
        TrialRecord& trial = trials[it->second];
        trial.samples = group.samples;
        result.attached += group.samples.size();
        if (!trial.samples.empty() && trial.samples.back().t > trial.trial_duration_ms)
            ++result.overlong_trials;
    }
    result.trials = std::move(trials);
    return result;
}

} // namespace gazeflow
