#pragma once

#include "gazeflow/aoi.hpp"
#include "gazeflow/fixation.hpp"
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

struct WordFeatures {
    int token_index = 0;
    double trt_ms = 0.0;
    std::size_t nfix = 0;
    // Undefined when the reader fixated nothing on the text.
    std::optional<double> relative_fixation;

    friend bool operator==(const WordFeatures&, const WordFeatures&) = default;
};

/// One record per token of `boxes` (in box order). Fixations outside every
/// AOI contribute to no token.
std::vector<WordFeatures> word_features(std::span<const Fixation> fixations,
                                        std::span<const WordBox> boxes);

// rf = trt / sum(trt); all undefined when the sum is zero.
void relative_fixation(std::vector<WordFeatures>& words);

// Mean TRT over fixated words only (trt > 0); nullopt if none were fixated.
std::optional<double> mean_trt_fixated(std::span<const WordFeatures> words);
// Mean fixation count over every word, unfixated ones included.
// Throws InputError on empty input.
double mean_nfix_all(std::span<const WordFeatures> words);

struct TrialFeatures {
    std::string participant_id;
    std::string text_id;
    Task task = Task::NR;
    double f1_fix_on_target = 0.0;
    double f2_total_fixations = 0.0;
    std::optional<double> f3_target_total_ratio;
    double f4_trt_text_ms = 0.0;
    double f5_trt_target_ms = 0.0;
    std::optional<double> f6_trt_target_text_ratio;
    double f7_trial_time_ms = 0.0;
    std::optional<double> avg_word_trt_in_target_ms;
    std::optional<double> avg_word_trt_out_target_ms;
    bool label = false;

    // True when at least one fixation landed on a word of the text.
    bool has_text_fixation() const
    {
        return avg_word_trt_in_target_ms.has_value() || avg_word_trt_out_target_ms.has_value();
    }

    friend bool operator==(const TrialFeatures&, const TrialFeatures&) = default;
};

// `boxes` are the expanded AOIs with is_target set for the trial's question.
TrialFeatures trial_features(const TrialRecord& trial, std::span<const Fixation> fixations,
                             std::span<const WordBox> boxes);

// Characters of the token (UTF-8 code points) with leading and trailing
// punctuation removed.
std::size_t word_length(std::string_view token);

struct WordFeatureRow {
    std::string participant_id;
    std::string text_id;
    WordFeatures word;

    friend bool operator==(const WordFeatureRow&, const WordFeatureRow&) = default;
};

struct LengthBucket {
    double mean_trt_ms = 0.0;
    double std_trt_ms = 0.0;  // sample std over tokens, 0 for one token
    std::size_t tokens = 0;
};

/// TRT by word length: each token's TRT is first averaged over the readers who
/// fixated it, then token averages are pooled per character length.
/// `texts` supplies the token strings.
std::map<std::size_t, LengthBucket> word_length_curve(std::span<const WordFeatureRow> rows,
                                                      std::span<const TextLayout> texts);

// participant_id,text_id,token_index,trt_ms,nfix,relative_fixation
void write_word_features(std::ostream& out, std::span<const WordFeatureRow> rows);
std::vector<WordFeatureRow> parse_word_features(std::string_view source);

// participant_id,text_id,task,f1,f2,f3,f4,f5,f6,f7,avg_in,avg_out,label
void write_trial_features(std::ostream& out, std::span<const TrialFeatures> rows);
std::vector<TrialFeatures> parse_trial_features(std::string_view source);

} // namespace gazeflow
