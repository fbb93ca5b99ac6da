#pragma once

#include "gazeflow/features.hpp"
#include "gazeflow/model.hpp"

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gazeflow {

struct QualityThresholds {
    double min_fraction_correct = 0.5;         // must be strictly above
    double min_sample_rate_hz = 10.0;          // must be at least
    double min_accuracy_pct_exclusive = 0.0;   // must be strictly above
    int min_screen_w = 1280;
    int min_screen_h = 720;

    void validate() const;
};

// Declaration order is gate order.
enum class RejectionReason { LowCorrectness, RecorderError, LowSampleRate, ZeroAccuracy, LowResolution };

std::string_view to_string(RejectionReason reason);

struct Rejection {
    std::string participant_id;
    RejectionReason reason = RejectionReason::RecorderError;
};

struct FilterResult {
    std::vector<ParticipantRecord> kept;
    std::vector<Rejection> rejected;

    std::map<RejectionReason, std::size_t> histogram() const;
    std::size_t initial() const { return kept.size() + rejected.size(); }
};

/// First failing gate for one participant, or nullopt if every gate passes.
/// A missing metadata field, no trials, no stored gaze samples, or a trial
/// without a target reference is a recorder error. The correctness gate is
/// only skipped (falling through to recorder error) when fraction_correct
/// itself is missing.
std::optional<RejectionReason> first_failed_gate(const ParticipantRecord& participant,
                                                 std::span<const TrialRecord* const> trials,
                                                 const QualityThresholds& thresholds);

FilterResult filter_participants(std::span<const ParticipantRecord> participants,
                                 std::span<const TrialRecord> trials,
                                 const QualityThresholds& thresholds = {});

// participant_id,reason
void write_rejections(std::ostream& out, const FilterResult& result);
// "kept K of N (x%); LowCorrectness: a (p%); ..." relative to the initial cohort.
std::string rejection_summary(const FilterResult& result);

struct DropResult {
    std::vector<TrialFeatures> kept;
    std::size_t dropped = 0;
};

// Removes trials in which no fixation landed on the text.
DropResult drop_empty_trials(std::vector<TrialFeatures> trials);

} // namespace gazeflow
