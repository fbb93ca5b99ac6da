#pragma once

#include "gazeflow/model.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gazeflow {

// Which absorbed sample supplies a fixation's timestamp.
enum class FixationTime {
    last_sample,  // default: time of the last sample merged into the fixation
    anchor,       // time of the sample that opened the fixation
};

struct FixationParams {
    double window_ms = 150.0;
    double radius_px = 32.0;
    double bounds_tolerance_px = 50.0;
    double min_fix_ms = 50.0;
    FixationTime timestamp = FixationTime::last_sample;

    // Throws InputError unless every numeric parameter is finite and > 0.
    void validate() const;
};

struct Fixation {
    double x = 0.0;  // centroid, image px
    double y = 0.0;
    double t = 0.0;  // ms
    double duration_ms = 0.0;
    std::size_t merged_count = 1;
    bool is_first = false;

    friend bool operator==(const Fixation&, const Fixation&) = default;
};

// Screen -> image coordinates; time untouched.
std::vector<GazeSample> normalize(std::span<const GazeSample> samples, const StimulusFrame& frame);

/// Greedy merge over time-sorted samples. Each unconsumed sample opens a
/// fixation and absorbs the following samples while they stay strictly within
/// radius_px of it and within window_ms after it; the first sample breaking
/// either condition ends the run. The centroid is the mean of the run.
/// Throws InternalError if the input is not sorted by time.
std::vector<Fixation> merge_fixations(std::span<const GazeSample> samples,
                                      const FixationParams& params);

// duration_0 = 0, duration_i = t_i - t_{i-1}.
void assign_durations(std::vector<Fixation>& fixations);

// Keeps fixations inside the frame grown by `tolerance` on every side.
void clip_to_frame(std::vector<Fixation>& fixations, const StimulusFrame& frame, double tolerance);

// Removes fixations shorter than min_fix_ms, except the one flagged is_first.
void drop_short(std::vector<Fixation>& fixations, double min_fix_ms);

/// normalize -> merge -> durations -> clip -> drop_short.
std::vector<Fixation> run_pipeline(std::span<const GazeSample> samples, const StimulusFrame& frame,
                                   const FixationParams& params = {});

struct TrialFixations {
    std::string trial_id;
    std::vector<Fixation> fixations;

    friend bool operator==(const TrialFixations&, const TrialFixations&) = default;
};

// trial_id,fix_index,x_px,y_px,t_ms,duration_ms,merged_count,is_first
void write_fixation_table(std::ostream& out, std::span<const TrialFixations> trials);
// Rows are grouped by trial_id (in order of first appearance) and ordered by fix_index.
std::vector<TrialFixations> parse_fixation_table(std::string_view source);

} // namespace gazeflow
