#include "gazeflow/stats.hpp"

#include "gazeflow/error.hpp"
#include "gazeflow/table.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <set>

namespace gazeflow {

std::vector<double> fractional_ranks(std::span<const double> values)
{
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && values[order[j]] == values[order[i]])
            ++j;
        // Positions i..j-1 (0-based) share rank ((i+1) + j) / 2.
        const double rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k)
            ranks[order[k]] = rank;
        i = j;
    }
    return ranks;
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y)
{
    if (x.size() != y.size())
        throw InputError("pearson: length mismatch");
    const std::size_t n = x.size();
    if (n < 2)
        return std::nullopt;
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0)
        return std::nullopt;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

SpearmanResult spearman(std::span<const std::optional<double>> x,
                        std::span<const std::optional<double>> y)
{
    if (x.size() != y.size())
        throw InputError("spearman: vectors differ in length (" + std::to_string(x.size()) +
                         " vs " + std::to_string(y.size()) + ")");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] && y[i] && std::isfinite(*x[i]) && std::isfinite(*y[i])) {
            xs.push_back(*x[i]);
            ys.push_back(*y[i]);
        }
    }
    SpearmanResult result;
    result.pairs_used = xs.size();
    if (xs.size() < 3) {
        result.diagnostic = "fewer than 3 complete pairs (" + std::to_string(xs.size()) + ")";
        return result;
    }
    result.rho = pearson(fractional_ranks(xs), fractional_ranks(ys));
    if (!result.rho)
        result.diagnostic = "constant input: rank variance is zero";
    return result;
}

SpearmanResult spearman(std::span<const double> x, std::span<const double> y)
{
    std::vector<std::optional<double>> xo(x.begin(), x.end());
    std::vector<std::optional<double>> yo(y.begin(), y.end());
    return spearman(xo, yo);
}

namespace {

struct TextWords {
    // participant -> token -> features
    std::map<std::string, std::map<int, WordFeatures>> by_participant;
    std::set<int> tokens;
    std::vector<WordFeatures> all;
};

std::map<std::string, TextWords> group_by_text(std::span<const WordFeatureRow> rows)
{
    std::map<std::string, TextWords> texts;
    for (const auto& row : rows) {
        TextWords& tw = texts[row.text_id];
        tw.by_participant[row.participant_id][row.word.token_index] = row.word;
        tw.tokens.insert(row.word.token_index);
        tw.all.push_back(row.word);
    }
    return texts;
}

// Mean relative fixation per token across readers; missing when no reader fixated it.
std::vector<std::optional<double>> mean_relative_fixation(const TextWords& tw)
{
    std::vector<std::optional<double>> out;
    for (int token : tw.tokens) {
        double rf_sum = 0.0;
        std::size_t rf_n = 0;
        double trt_total = 0.0;
        for (const auto& [pid, words] : tw.by_participant) {
            auto it = words.find(token);
            if (it == words.end())
                continue;
            trt_total += it->second.trt_ms;
            if (it->second.relative_fixation) {
                rf_sum += *it->second.relative_fixation;
                ++rf_n;
            }
        }
        if (trt_total > 0.0 && rf_n > 0)
            out.emplace_back(rf_sum / static_cast<double>(rf_n));
        else
            out.emplace_back(std::nullopt);
    }
    return out;
}

} // namespace

std::vector<ComparisonRow> compare_datasets(std::span<const WordFeatureRow> a,
                                            std::span<const WordFeatureRow> b,
                                            const std::map<std::string, std::string>& languages)
{
    const auto texts_a = group_by_text(a);
    const auto texts_b = group_by_text(b);

    std::vector<ComparisonRow> rows;
    for (const auto& [text_id, ta] : texts_a) {
        auto it = texts_b.find(text_id);
        if (it == texts_b.end())
            continue;
        const TextWords& tb = it->second;
        if (ta.tokens != tb.tokens) {
            std::string mismatched;
            std::vector<int> diff;
            std::set_symmetric_difference(ta.tokens.begin(), ta.tokens.end(), tb.tokens.begin(),
                                          tb.tokens.end(), std::back_inserter(diff));
            for (int t : diff)
                mismatched += " " + std::to_string(t);
            throw InputError("alignment error in text '" + text_id +
                             "': token indices present in only one dataset:" + mismatched);
        }
        ComparisonRow row;
        row.text_id = text_id;
        if (auto lang = languages.find(text_id); lang != languages.end())
            row.language = lang->second;
        row.trt_a = mean_trt_fixated(ta.all);
        row.trt_b = mean_trt_fixated(tb.all);
        row.nfix_a = mean_nfix_all(ta.all);
        row.nfix_b = mean_nfix_all(tb.all);
        const auto rf_a = mean_relative_fixation(ta);
        const auto rf_b = mean_relative_fixation(tb);
        const SpearmanResult s = spearman(rf_a, rf_b);
        row.rho = s.rho;
        row.words_correlated = s.pairs_used;
        rows.push_back(std::move(row));
    }
    std::stable_sort(rows.begin(), rows.end(), [](const ComparisonRow& l, const ComparisonRow& r) {
        return l.language != r.language ? l.language < r.language : l.text_id < r.text_id;
    });
    return rows;
}

namespace {

Moments checked_moments(std::span<const double> values, const char* which)
{
    for (double v : values)
        if (!std::isfinite(v))
            throw InputError(std::string("t-test: non-finite value in ") + which);
    return moments(values);
}

} // namespace

TTestResult independent_t_test(std::span<const double> group1, std::span<const double> group2,
                               VarianceModel variance)
{
    if (group1.size() < 2 || group2.size() < 2)
        throw InputError("t-test: each group needs at least two values (got " +
                         std::to_string(group1.size()) + " and " + std::to_string(group2.size()) +
                         ")");
    const Moments m1 = checked_moments(group1, "group 1");
    const Moments m2 = checked_moments(group2, "group 2");
    const double n1 = static_cast<double>(m1.n);
    const double n2 = static_cast<double>(m2.n);
    const double v1 = m1.std * m1.std;
    const double v2 = m2.std * m2.std;

    TTestResult r;
    r.n1 = m1.n;
    r.n2 = m2.n;
    r.mean1 = m1.mean;
    r.mean2 = m2.mean;

    double se = 0.0;
    if (variance == VarianceModel::pooled) {
        r.df = n1 + n2 - 2.0;
        const double pooled = ((n1 - 1.0) * v1 + (n2 - 1.0) * v2) / r.df;
        se = std::sqrt(pooled * (1.0 / n1 + 1.0 / n2));
    } else {
        const double a = v1 / n1;
        const double b = v2 / n2;
        se = std::sqrt(a + b);
        const double denom = a * a / (n1 - 1.0) + b * b / (n2 - 1.0);
        r.df = denom > 0.0 ? (a + b) * (a + b) / denom : n1 + n2 - 2.0;
    }

    const double diff = m1.mean - m2.mean;
    if (se == 0.0) {
        if (diff == 0.0) {
            r.t = 0.0;
            r.p = 1.0;
        } else {
            r.t = diff > 0 ? std::numeric_limits<double>::infinity()
                           : -std::numeric_limits<double>::infinity();
            r.p = 0.0;
            r.degenerate = true;
        }
        return r;
    }
    r.t = diff / se;
    r.p = student_t_two_sided_p(r.t, r.df);
    return r;
}

namespace {

// Continued fraction for I_x(a,b), modified Lentz.
double beta_continued_fraction(double x, double a, double b)
{
    constexpr int max_iter = 10000;
    constexpr double eps = 1e-16;
    constexpr double tiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < tiny)
        d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= max_iter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny)
            d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < tiny)
            d = tiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < eps)
            return h;
    }
    throw InternalError("regularized_incomplete_beta: continued fraction did not converge");
}

} // namespace

double regularized_incomplete_beta(double x, double a, double b)
{
    if (!(a > 0.0) || !(b > 0.0))
        throw InputError("regularized_incomplete_beta: a and b must be positive");
    if (!(x >= 0.0 && x <= 1.0))
        throw InputError("regularized_incomplete_beta: x must lie in [0,1]");
    if (x == 0.0)
        return 0.0;
    if (x == 1.0)
        return 1.0;
    const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                             a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * beta_continued_fraction(x, a, b) / a;
    return 1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b;
}

double student_t_two_sided_p(double t, double df)
{
    if (!(df > 0.0))
        throw InputError("student_t_two_sided_p: df must be positive");
    if (std::isnan(t))
        throw InputError("student_t_two_sided_p: t is NaN");
    if (std::isinf(t))
        return 0.0;
    if (t == 0.0)
        return 1.0;
    const double x = df / (df + t * t);
    return std::clamp(regularized_incomplete_beta(x, 0.5 * df, 0.5), 0.0, 1.0);
}

Moments moments(std::span<const double> values)
{
    Moments m;
    m.n = values.size();
    if (m.n == 0)
        return m;
    double sum = 0.0;
    for (double v : values)
        sum += v;
    m.mean = sum / static_cast<double>(m.n);
    if (m.n > 1) {
        double ss = 0.0;
        for (double v : values)
            ss += (v - m.mean) * (v - m.mean);
        m.std = std::sqrt(ss / static_cast<double>(m.n - 1));
    }
    return m;
}

Quartiles quartiles(std::span<const double> values)
{
    if (values.empty())
        throw InputError("quartiles: empty input");
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    auto at = [&](double q) {
        const double pos = q * static_cast<double>(v.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const std::size_t hi = std::min(lo + 1, v.size() - 1);
        const double frac = pos - static_cast<double>(lo);
        return v[lo] + frac * (v[hi] - v[lo]);
    };
    return Quartiles{v.front(), at(0.25), at(0.5), at(0.75), v.back()};
}

CohortSummary cohort_summary(std::span<const ParticipantRecord> participants)
{
    std::vector<double> ages, rates;
    std::map<std::string, std::pair<std::vector<double>, std::vector<double>>> lang;
    std::map<std::string, std::size_t> counts;
    for (const auto& p : participants) {
        if (p.age)
            ages.push_back(*p.age);
        if (p.reported_sample_rate_hz)
            rates.push_back(*p.reported_sample_rate_hz);
        const std::string key = p.language.value_or("unknown");
        ++counts[key];
        auto& [acc, total] = lang[key];
        if (p.validation_accuracy_pct)
            acc.push_back(*p.validation_accuracy_pct);
        if (p.total_experiment_ms)
            total.push_back(*p.total_experiment_ms);
    }
    CohortSummary s;
    s.age = moments(ages);
    s.sample_rate_hz = moments(rates);
    for (const auto& [key, data] : lang) {
        LanguageSummary ls;
        ls.participants = counts[key];
        if (!data.first.empty())
            ls.accuracy_pct = quartiles(data.first);
        if (!data.second.empty())
            ls.total_time_ms = quartiles(data.second);
        s.by_language.emplace(key, ls);
    }
    return s;
}

std::vector<TTestResult> feature_t_tests(std::span<const TrialFeatures> trials, Task task,
                                         VarianceModel variance)
{
    using Getter = std::optional<double> (*)(const TrialFeatures&);
    static const std::pair<const char*, Getter> features[] = {
        {"f1_fix_on_target", [](const TrialFeatures& t) -> std::optional<double> { return t.f1_fix_on_target; }},
        {"f2_total_fixations", [](const TrialFeatures& t) -> std::optional<double> { return t.f2_total_fixations; }},
        {"f3_target_total_ratio", [](const TrialFeatures& t) { return t.f3_target_total_ratio; }},
        {"f4_trt_text", [](const TrialFeatures& t) -> std::optional<double> { return t.f4_trt_text_ms; }},
        {"f5_trt_target", [](const TrialFeatures& t) -> std::optional<double> { return t.f5_trt_target_ms; }},
        {"f6_trt_target_text_ratio", [](const TrialFeatures& t) { return t.f6_trt_target_text_ratio; }},
        {"f7_trial_time", [](const TrialFeatures& t) -> std::optional<double> { return t.f7_trial_time_ms; }},
    };
    std::vector<TTestResult> out;
    for (const auto& [name, get] : features) {
        std::vector<double> wrong, right;
        for (const auto& t : trials) {
            if (t.task != task)
                continue;
            if (auto v = get(t))
                (t.label ? right : wrong).push_back(*v);
        }
        TTestResult r = independent_t_test(wrong, right, variance);
        r.feature = name;
        out.push_back(std::move(r));
    }
    return out;
}

void write_comparison(std::ostream& out, std::span<const ComparisonRow> rows)
{
    CsvWriter w(out);
    w.header({"language", "text_id", "trt_a", "trt_b", "nfix_a", "nfix_b", "rho", "words"});
    for (const auto& r : rows) {
        w.field(r.language)
            .field(r.text_id)
            .field(r.trt_a)
            .field(r.trt_b)
            .field(r.nfix_a)
            .field(r.nfix_b)
            .field(r.rho)
            .field(r.words_correlated);
        w.end_row();
    }
}

std::vector<ComparisonRow> parse_comparison(std::string_view source)
{
    CsvTable table = CsvTable::parse(source);
    std::vector<ComparisonRow> rows;
    if (table.empty())
        return rows;
    const auto c_lang = table.require("language");
    const auto c_text = table.require("text_id");
    const auto c_ta = table.require("trt_a");
    const auto c_tb = table.require("trt_b");
    const auto c_na = table.require("nfix_a");
    const auto c_nb = table.require("nfix_b");
    const auto c_rho = table.require("rho");
    const auto c_words = table.require("words");
    for (const auto& r : table.rows()) {
        ComparisonRow row;
        row.language = r.fields[c_lang];
        row.text_id = r.fields[c_text];
        row.trt_a = table.optional_number(r, c_ta);
        row.trt_b = table.optional_number(r, c_tb);
        row.nfix_a = table.number(r, c_na);
        row.nfix_b = table.number(r, c_nb);
        row.rho = table.optional_number(r, c_rho);
        row.words_correlated = static_cast<std::size_t>(table.integer(r, c_words));
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_t_tests(std::ostream& out, Task task, std::span<const TTestResult> rows, bool header)
{
    CsvWriter w(out);
    if (header)
        w.header({"task", "feature", "n1", "n2", "mean1", "mean2", "t", "df", "p"});
    for (const auto& r : rows) {
        w.field(to_string(task))
            .field(r.feature)
            .field(r.n1)
            .field(r.n2)
            .field(r.mean1)
            .field(r.mean2)
            .field(r.t)
            .field(r.df)
            .field(r.p);
        w.end_row();
    }
}

void write_cohort_summary(std::ostream& out, const CohortSummary& s)
{
    CsvWriter w(out);
    w.header({"group", "statistic", "n", "mean", "std", "min", "q1", "median", "q3", "max"});
    auto moments_row = [&](const char* name, const Moments& m) {
        w.field("all").field(name).field(m.n);
        if (m.n > 0)
            w.field(m.mean).field(m.std);
        else
            w.field("NA").field("NA");
        w.field("").field("").field("").field("").field("");
        w.end_row();
    };
    moments_row("age", s.age);
    moments_row("sample_rate_hz", s.sample_rate_hz);
    auto box_row = [&](const std::string& lang, const char* name, std::size_t n,
                       const std::optional<Quartiles>& q) {
        w.field(lang).field(name).field(n).field("").field("");
        if (q)
            w.field(q->min).field(q->q1).field(q->median).field(q->q3).field(q->max);
        else
            w.field("NA").field("NA").field("NA").field("NA").field("NA");
        w.end_row();
    };
    for (const auto& [lang, ls] : s.by_language) {
        box_row(lang, "accuracy_pct", ls.participants, ls.accuracy_pct);
        box_row(lang, "total_ms", ls.participants, ls.total_time_ms);
    }
}

} // namespace gazeflow
