#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gazeflow {

/// One gaze estimate: time since trial start and a screen (or image) position.
struct GazeSample {
    double t = 0.0;  // ms
    double x = 0.0;  // px
    double y = 0.0;  // px

    friend bool operator==(const GazeSample&, const GazeSample&) = default;
};

/// Placement of the stimulus image on the participant's screen.
struct StimulusFrame {
    double origin_x = 0.0;
    double origin_y = 0.0;
    double width = 1280.0;
    double height = 720.0;

    bool valid() const;

    friend bool operator==(const StimulusFrame&, const StimulusFrame&) = default;
};

enum class Task { NR, IS };

std::string_view to_string(Task task);
// Case-insensitive; throws InputError on anything other than nr/is.
Task parse_task(std::string_view text);

struct TrialRecord {
    std::string trial_id;
    std::string participant_id;
    std::string text_id;
    Task task = Task::NR;
    StimulusFrame frame;
    std::vector<GazeSample> samples;
    std::string question_id;
    bool answered_correctly = false;
    double trial_duration_ms = 0.0;

    friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

// Fields are optional because a missing value is itself a quality signal.
struct ParticipantRecord {
    std::string participant_id;
    std::optional<std::string> language;
    std::optional<double> age;
    std::optional<double> reported_sample_rate_hz;
    std::optional<double> validation_accuracy_pct;
    std::optional<int> screen_w;
    std::optional<int> screen_h;
    std::optional<double> fraction_correct;
    std::optional<double> total_experiment_ms;

    bool complete() const;

    friend bool operator==(const ParticipantRecord&, const ParticipantRecord&) = default;
};

} // namespace gazeflow
