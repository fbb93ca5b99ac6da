#include "gazeflow/features.hpp"

#include "gazeflow/error.hpp"
#include "gazeflow/table.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace gazeflow {

std::vector<WordFeatures> word_features(std::span<const Fixation> fixations,
                                        std::span<const WordBox> boxes)
{
    std::vector<WordFeatures> out;
    out.reserve(boxes.size());
    for (const auto& b : boxes)
        out.push_back(WordFeatures{b.token_index, 0.0, 0, std::nullopt});

    AoiIndex index(boxes);
    std::map<int, std::size_t> slot;
    for (std::size_t i = 0; i < boxes.size(); ++i)
        slot.emplace(boxes[i].token_index, i);

    for (const auto& f : fixations) {
        auto token = index.lookup(f.x, f.y);
        if (!token)
            continue;
        WordFeatures& w = out[slot.at(*token)];
        w.trt_ms += f.duration_ms;
        ++w.nfix;
    }
    return out;
}

void relative_fixation(std::vector<WordFeatures>& words)
{
    double total = 0.0;
    for (const auto& w : words)
        total += w.trt_ms;
    for (auto& w : words) {
        if (total > 0.0)
            w.relative_fixation = w.trt_ms / total;
        else
            w.relative_fixation.reset();
    }
}

std::optional<double> mean_trt_fixated(std::span<const WordFeatures> words)
{
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& w : words) {
        if (w.trt_ms > 0.0) {
            sum += w.trt_ms;
            ++n;
        }
    }
    if (n == 0)
        return std::nullopt;
    return sum / static_cast<double>(n);
}

double mean_nfix_all(std::span<const WordFeatures> words)
{
    if (words.empty())
        throw InputError("mean_nfix_all: no words");
    double sum = 0.0;
    for (const auto& w : words)
        sum += static_cast<double>(w.nfix);
    return sum / static_cast<double>(words.size());
}

TrialFeatures trial_features(const TrialRecord& trial, std::span<const Fixation> fixations,
                             std::span<const WordBox> boxes)
{
    TrialFeatures tf;
    tf.participant_id = trial.participant_id;
    tf.text_id = trial.text_id;
    tf.task = trial.task;
    tf.label = trial.answered_correctly;
    tf.f7_trial_time_ms = trial.trial_duration_ms;
    tf.f2_total_fixations = static_cast<double>(fixations.size());

    AoiIndex index(boxes);
    std::map<int, bool> target;
    for (const auto& b : boxes)
        target[b.token_index] = b.is_target;

    for (const auto& f : fixations) {
        auto token = index.lookup(f.x, f.y);
        if (!token)
            continue;
        tf.f4_trt_text_ms += f.duration_ms;
        if (target[*token]) {
            tf.f1_fix_on_target += 1.0;
            tf.f5_trt_target_ms += f.duration_ms;
        }
    }
    if (tf.f2_total_fixations > 0.0)
        tf.f3_target_total_ratio = tf.f1_fix_on_target / tf.f2_total_fixations;
    if (tf.f4_trt_text_ms > 0.0)
        tf.f6_trt_target_text_ratio = tf.f5_trt_target_ms / tf.f4_trt_text_ms;

    const auto words = word_features(fixations, boxes);
    double in_sum = 0.0, out_sum = 0.0;
    std::size_t in_n = 0, out_n = 0;
    for (const auto& w : words) {
        if (w.nfix == 0)
            continue;
        if (target[w.token_index]) {
            in_sum += w.trt_ms;
            ++in_n;
        } else {
            out_sum += w.trt_ms;
            ++out_n;
        }
    }
    if (in_n > 0)
        tf.avg_word_trt_in_target_ms = in_sum / static_cast<double>(in_n);
    if (out_n > 0)
        tf.avg_word_trt_out_target_ms = out_sum / static_cast<double>(out_n);
    return tf;
}

namespace {

// Decodes one UTF-8 code point starting at s[i]; advances i. Invalid bytes
// decode as themselves.
char32_t next_code_point(std::string_view s, std::size_t& i)
{
    const auto lead = static_cast<unsigned char>(s[i]);
    int extra = 0;
    char32_t cp = lead;
    if (lead >= 0xF0 && lead < 0xF8) {
        extra = 3;
        cp = lead & 0x07;
    } else if (lead >= 0xE0) {
        extra = 2;
        cp = lead & 0x0F;
    } else if (lead >= 0xC0) {
        extra = 1;
        cp = lead & 0x1F;
    }
    ++i;
    for (int k = 0; k < extra && i < s.size(); ++k, ++i)
        cp = (cp << 6) | (static_cast<unsigned char>(s[i]) & 0x3F);
    return cp;
}

bool is_punctuation(char32_t cp)
{
    if (cp < 0x80)
        return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
               (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E);
    switch (cp) {
    case 0x00A1: // ¡
    case 0x00AB: // «
    case 0x00BB: // »
    case 0x00BF: // ¿
    case 0x2013: // en dash
    case 0x2014: // em dash
    case 0x2018:
    case 0x2019:
    case 0x201A:
    case 0x201C:
    case 0x201D:
    case 0x201E:
    case 0x2026: // ellipsis
        return true;
    default:
        return false;
    }
}

} // namespace

std::size_t word_length(std::string_view token)
{
    std::vector<char32_t> cps;
    for (std::size_t i = 0; i < token.size();)
        cps.push_back(next_code_point(token, i));
    std::size_t first = 0;
    std::size_t last = cps.size();
    while (first < last && (is_punctuation(cps[first]) || cps[first] == U' '))
        ++first;
    while (last > first && (is_punctuation(cps[last - 1]) || cps[last - 1] == U' '))
        --last;
    return last - first;
}

std::map<std::size_t, LengthBucket> word_length_curve(std::span<const WordFeatureRow> rows,
                                                      std::span<const TextLayout> texts)
{
    std::map<std::pair<std::string, int>, std::string> token_text;
    for (const auto& layout : texts)
        for (const auto& w : layout.words)
            token_text[{layout.text_id, w.token_index}] = w.text;

    struct Acc {
        double sum = 0.0;
        std::size_t n = 0;
    };
    std::map<std::pair<std::string, int>, Acc> per_token;
    for (const auto& row : rows) {
        if (row.word.trt_ms <= 0.0)
            continue;
        Acc& a = per_token[{row.text_id, row.word.token_index}];
        a.sum += row.word.trt_ms;
        ++a.n;
    }

    std::map<std::size_t, std::vector<double>> by_length;
    for (const auto& [key, acc] : per_token) {
        auto it = token_text.find(key);
        if (it == token_text.end())
            throw InputError("word_length_curve: no token text for text '" + key.first +
                             "' token " + std::to_string(key.second));
        by_length[word_length(it->second)].push_back(acc.sum / static_cast<double>(acc.n));
    }

    std::map<std::size_t, LengthBucket> curve;
    for (const auto& [length, values] : by_length) {
        LengthBucket b;
        b.tokens = values.size();
        double sum = 0.0;
        for (double v : values)
            sum += v;
        b.mean_trt_ms = sum / static_cast<double>(values.size());
        if (values.size() > 1) {
            double ss = 0.0;
            for (double v : values)
                ss += (v - b.mean_trt_ms) * (v - b.mean_trt_ms);
            b.std_trt_ms = std::sqrt(ss / static_cast<double>(values.size() - 1));
        }
        curve.emplace(length, b);
    }
    return curve;
}

void write_word_features(std::ostream& out, std::span<const WordFeatureRow> rows)
{
    CsvWriter w(out);
    w.header({"participant_id", "text_id", "token_index", "trt_ms", "nfix", "relative_fixation"});
    for (const auto& row : rows) {
        w.field(row.participant_id)
            .field(row.text_id)
            .field(row.word.token_index)
            .field(row.word.trt_ms)
            .field(row.word.nfix)
            .field(row.word.relative_fixation);
        w.end_row();
    }
}

std::vector<WordFeatureRow> parse_word_features(std::string_view source)
{
    CsvTable table = CsvTable::parse(source);
    std::vector<WordFeatureRow> rows;
    if (table.empty())
        return rows;
    const auto c_p = table.require("participant_id");
    const auto c_t = table.require("text_id");
    const auto c_i = table.require("token_index");
    const auto c_trt = table.require("trt_ms");
    const auto c_n = table.require("nfix");
    const auto c_rf = table.require("relative_fixation");
    for (const auto& r : table.rows()) {
        WordFeatureRow row;
        row.participant_id = r.fields[c_p];
        row.text_id = r.fields[c_t];
        row.word.token_index = static_cast<int>(table.integer(r, c_i));
        row.word.trt_ms = table.number(r, c_trt);
        const long long nfix = table.integer(r, c_n);
        if (nfix < 0 || row.word.trt_ms < 0.0)
            throw InputError("line " + std::to_string(r.line) + ": negative trt or nfix");
        row.word.nfix = static_cast<std::size_t>(nfix);
        row.word.relative_fixation = table.optional_number(r, c_rf);
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_trial_features(std::ostream& out, std::span<const TrialFeatures> rows)
{
    CsvWriter w(out);
    w.header({"participant_id", "text_id", "task", "f1", "f2", "f3", "f4", "f5", "f6", "f7",
              "avg_in", "avg_out", "label"});
    for (const auto& tf : rows) {
        w.field(tf.participant_id)
            .field(tf.text_id)
            .field(to_string(tf.task))
            .field(tf.f1_fix_on_target)
            .field(tf.f2_total_fixations)
            .field(tf.f3_target_total_ratio)
            .field(tf.f4_trt_text_ms)
            .field(tf.f5_trt_target_ms)
            .field(tf.f6_trt_target_text_ratio)
            .field(tf.f7_trial_time_ms)
            .field(tf.avg_word_trt_in_target_ms)
            .field(tf.avg_word_trt_out_target_ms)
            .field(tf.label);
        w.end_row();
    }
}

std::vector<TrialFeatures> parse_trial_features(std::string_view source)
{
    CsvTable table = CsvTable::parse(source);
    std::vector<TrialFeatures> rows;
    if (table.empty())
        return rows;
    const auto c_p = table.require("participant_id");
    const auto c_t = table.require("text_id");
    const auto c_task = table.require("task");
    std::size_t c_f[7];
    for (int k = 0; k < 7; ++k)
        c_f[k] = table.require("f" + std::to_string(k + 1));
    const auto c_in = table.require("avg_in");
    const auto c_out = table.require("avg_out");
    const auto c_label = table.require("label");
    for (const auto& r : table.rows()) {
        TrialFeatures tf;
        tf.participant_id = r.fields[c_p];
        tf.text_id = r.fields[c_t];
        try {
            tf.task = parse_task(r.fields[c_task]);
        } catch (const InputError& e) {
            throw InputError("line " + std::to_string(r.line) + ": " + e.what());
        }
        tf.f1_fix_on_target = table.number(r, c_f[0]);
        tf.f2_total_fixations = table.number(r, c_f[1]);
        tf.f3_target_total_ratio = table.optional_number(r, c_f[2]);
        tf.f4_trt_text_ms = table.number(r, c_f[3]);
        tf.f5_trt_target_ms = table.number(r, c_f[4]);
        tf.f6_trt_target_text_ratio = table.optional_number(r, c_f[5]);
        tf.f7_trial_time_ms = table.number(r, c_f[6]);
        tf.avg_word_trt_in_target_ms = table.optional_number(r, c_in);
        tf.avg_word_trt_out_target_ms = table.optional_number(r, c_out);
        const long long label = table.integer(r, c_label);
        if (label != 0 && label != 1)
            throw InputError("line " + std::to_string(r.line) + ": label must be 0 or 1");
        tf.label = label == 1;
        rows.push_back(std::move(tf));
    }
    return rows;
}

} // namespace gazeflow
