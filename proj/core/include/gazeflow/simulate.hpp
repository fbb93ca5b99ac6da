#pragma once

#include "gazeflow/aoi.hpp"
#include "gazeflow/features.hpp"
#include "gazeflow/model.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace gazeflow {

struct Dwell {
    int token_index = 0;
    double dwell_ms = 0.0;
};

/// Fixation plan for one trial. A token may appear more than once (regressions).
struct DwellSchedule {
    std::vector<Dwell> dwells;
    double noise_sigma_px = 0.0;
    double rate_hz = 25.0;
    double dropout = 0.0;  // per-sample loss probability

    void validate() const;
};

struct SimulatedTrial {
    std::vector<GazeSample> samples;           // screen coordinates
    std::map<int, double> scheduled_dwell_ms;  // total per token
    double duration_ms = 0.0;                  // sum of dwells
};

/// Each dwell emits samples at start + k / rate (k = 0, 1, ... while inside
/// the dwell) at the token's raw-box center plus isotropic Gaussian noise.
/// Saccades are instantaneous. Throws InputError for unknown tokens.
SimulatedTrial generate(const DwellSchedule& schedule, std::span<const WordBox> boxes,
                        const StimulusFrame& frame, std::uint64_t seed);

// Adds one constant offset of length offset_px in a random direction.
std::vector<GazeSample> degrade(std::span<const GazeSample> samples, double offset_px,
                                std::uint64_t seed);

// Typesetting used for synthetic stimuli (Open Sans 24 px-like metrics).
struct LayoutStyle {
    double char_width_px = 13.0;
    double box_height_px = 28.0;
    double word_spacing_px = 25.0;
    double line_height_px = 72.0;
    double margin_x_px = 40.0;
    double margin_y_px = 40.0;
    double page_width_px = 1280.0;
    double page_height_px = 720.0;
};

// Left-aligned, wrapped raw boxes in reading order. Throws InputError when the
// text does not fit on the page.
std::vector<WordBox> layout_words(std::span<const std::string> words, const LayoutStyle& style = {});

struct ReadingModel {
    double base_ms = 120.0;
    double per_char_ms = 25.0;
    double jitter_ms = 0.0;         // uniform +/- on every dwell
    double regression_prob = 0.0;   // chance of jumping back after a word
    double target_gain = 1.0;       // dwell multiplier on is_target words
    double min_dwell_ms = 60.0;
};

// Left-to-right pass over `boxes` with optional regressions.
DwellSchedule reading_schedule(std::span<const WordBox> boxes, const ReadingModel& model,
                               std::uint64_t seed);

struct GroundTruthRow {
    std::string trial_id;
    int token_index = 0;
    double scheduled_dwell_ms = 0.0;
};

struct SimulatedDataset {
    std::vector<ParticipantRecord> participants;
    std::vector<TrialRecord> trials;  // samples attached
    std::vector<TextLayout> layouts;  // raw boxes plus target spans
    std::vector<GroundTruthRow> ground_truth;
};

struct DatasetSpec {
    std::size_t participants = 8;
    std::size_t texts = 4;
    std::size_t words_per_text = 40;
    double rate_hz = 25.0;
    double noise_sigma_px = 5.0;
    double accuracy_offset_px = 0.0;
};

SimulatedDataset simulate_dataset(const DatasetSpec& spec, std::uint64_t seed);
// One reader, one 20-word text, fixed seed.
SimulatedDataset demo_dataset();

// trial_id,token_index,scheduled_dwell_ms
void write_ground_truth(std::ostream& out, std::span<const GroundTruthRow> rows);

} // namespace gazeflow
