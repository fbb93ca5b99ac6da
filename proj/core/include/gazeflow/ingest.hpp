#pragma once

#include "gazeflow/model.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gazeflow {

enum class GazeFormat { csv, json_lines };

struct TrialSamples {
    std::string trial_id;
    std::vector<GazeSample> samples;

    friend bool operator==(const TrialSamples&, const TrialSamples&) = default;
};

/// Parsed gaze log. Trials are ordered by id; samples within a trial are
/// time-sorted with duplicate timestamps collapsed to the last row seen.
struct GazeLog {
    std::vector<TrialSamples> trials;
    std::size_t rows = 0;
    std::size_t duplicates_collapsed = 0;
    std::size_t reordered_trials = 0;

    std::size_t sample_count() const;
};

// CSV header: trial_id,t_ms,x_px,y_px (any order, extra columns ignored).
// JSON lines use the same keys.
GazeLog parse_gaze_log(std::string_view source, GazeFormat format = GazeFormat::csv);
void write_gaze_log(std::ostream& out, std::span<const TrialSamples> trials);

struct KnownIds {
    std::optional<std::set<std::string>> participants;
    std::optional<std::set<std::string>> texts;
};

// One JSON object per line:
//   {"trial_id"?, "participant_id", "text_id", "task", "frame": {x,y,w,h},
//    "question_id", "correct", "trial_ms"}
// trial_id defaults to "<participant_id>:<text_id>".
std::vector<TrialRecord> parse_trial_meta(std::string_view source, const KnownIds& known = {});
void write_trial_meta(std::ostream& out, std::span<const TrialRecord> trials);

// {"id", "language", "age", "sample_rate_hz", "accuracy_pct", "screen_w",
//  "screen_h", "fraction_correct", "total_ms"}; absent or null fields stay empty.
std::vector<ParticipantRecord> parse_participants(std::string_view source);
void write_participants(std::ostream& out, std::span<const ParticipantRecord> participants);

struct AttachResult {
    std::vector<TrialRecord> trials;
    std::size_t attached = 0;
    std::size_t orphan_samples = 0;
    std::size_t orphan_trial_ids = 0;
    // Trials whose last sample lies past trial_duration_ms.
    std::size_t overlong_trials = 0;
};

AttachResult attach_samples(std::vector<TrialRecord> trials, const GazeLog& log);

} // namespace gazeflow
