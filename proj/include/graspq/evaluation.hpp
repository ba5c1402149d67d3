#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "graspq/detector.hpp"
#include "graspq/interchange.hpp"

namespace graspq {

struct FrameRecord {
    std::string sequence_id;
    std::string subject_id;
    std::string object_id;
    int frame = 0;
    double epsilon = -1.0;
    double volume = 0.0;
    bool detected = false;
    std::optional<bool> gt;
};

/// One record per frame, in frame order.
inline std::vector<FrameRecord> run_sequence(const Sequence& seq, const DetectorSettings& settings,
                                             const MeshRegistry& registry,
                                             const RestSkeleton& skeleton = RestSkeleton::standard()) {
    std::vector<FrameRecord> out;
    out.reserve(seq.frames.size());
    for (const auto& f : seq.frames) {
        const FrameInput in{seq.hand_shape, f.hand_pose, seq.object_id, f.object_pose};
        const ContactDecision d = evaluate_frame(in, settings, registry, skeleton);
        out.push_back({seq.sequence_id, seq.subject_id, seq.object_id, f.index, d.metrics.epsilon, d.metrics.volume,
                       d.in_contact, f.gt_contact});
    }
    return out;
}

/// Runs sequences on up to `threads` workers. The result order matches the input order
/// regardless of scheduling.
inline std::vector<std::vector<FrameRecord>> run_sequences(const std::vector<Sequence>& seqs,
                                                           const DetectorSettings& settings,
                                                           const MeshRegistry& registry, unsigned threads,
                                                           const RestSkeleton& skeleton = RestSkeleton::standard()) {
    std::vector<std::vector<FrameRecord>> results(seqs.size());
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(seqs.size())));
    if (threads <= 1) {
        for (std::size_t i = 0; i < seqs.size(); ++i) results[i] = run_sequence(seqs[i], settings, registry, skeleton);
        return results;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(seqs.size());
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < seqs.size(); i = next++) {
                try {
                    results[i] = run_sequence(seqs[i], settings, registry, skeleton);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return results;
}

struct ConfusionMatrix {
    long tp = 0, tn = 0, fp = 0, fn = 0;

    long total() const { return tp + tn + fp + fn; }

    // Rates in percent; NaN when the class is absent.
    double tp_pct() const { return pct(tp, tp + fn); }
    double fn_pct() const { return pct(fn, tp + fn); }
    double tn_pct() const { return pct(tn, tn + fp); }
    double fp_pct() const { return pct(fp, tn + fp); }
    double accuracy_pct() const { return pct(tp + tn, total()); }

    void add(bool gt, bool detected) {
        if (gt) (detected ? tp : fn)++;
        else (detected ? fp : tn)++;
    }

    ConfusionMatrix& operator+=(const ConfusionMatrix& o) {
        tp += o.tp, tn += o.tn, fp += o.fp, fn += o.fn;
        return *this;
    }

    bool operator==(const ConfusionMatrix&) const = default;

private:
    static double pct(long num, long den) {
        return den > 0 ? 100.0 * static_cast<double>(num) / static_cast<double>(den)
                       : std::numeric_limits<double>::quiet_NaN();
    }
};

enum class GroupBy { object, subject, overall };

inline constexpr const char* kOverallGroup = "Overall";

/// Confusion counts per group, keyed by the opaque id (or "Overall").
inline std::map<std::string, ConfusionMatrix> confusion(const std::vector<FrameRecord>& records, GroupBy by,
                                                        const Thresholds* rethreshold = nullptr) {
    std::map<std::string, ConfusionMatrix> groups;
    for (const auto& r : records) {
        if (!r.gt) throw InvalidInput("confusion: record " + r.sequence_id + "/" + std::to_string(r.frame) +
                                      " has no ground truth");
        const std::string& key = by == GroupBy::object ? r.object_id : by == GroupBy::subject ? r.subject_id : std::string(kOverallGroup);
        const bool det = rethreshold ? decide(QualityMetrics{r.epsilon, r.volume, 0}, *rethreshold) : r.detected;
        groups[key].add(*r.gt, det);
    }
    return groups;
}

inline ConfusionMatrix overall_confusion(const std::vector<FrameRecord>& records,
                                         const Thresholds* rethreshold = nullptr) {
    auto g = confusion(records, GroupBy::overall, rethreshold);
    return g.empty() ? ConfusionMatrix{} : g.begin()->second;
}

/// Confusion matrices for a list of alternative decision thresholds.
inline std::vector<std::pair<Thresholds, ConfusionMatrix>> sweep_thresholds(const std::vector<FrameRecord>& records,
                                                                            const std::vector<Thresholds>& grid) {
    std::vector<std::pair<Thresholds, ConfusionMatrix>> out;
    for (const auto& t : grid) out.emplace_back(t, overall_confusion(records, &t));
    return out;
}

/// First detected frame minus first ground-truth-positive frame, in frame-index units.
/// Empty when nothing was detected.
inline std::optional<int> first_detection_offset(const std::vector<FrameRecord>& sequence_records) {
    const auto gt = std::find_if(sequence_records.begin(), sequence_records.end(),
                                 [](const FrameRecord& r) { return r.gt.value_or(false); });
    if (gt == sequence_records.end()) throw InvalidInput("first_detection_offset: sequence has no positive frame");
    const auto det = std::find_if(sequence_records.begin(), sequence_records.end(),
                                  [](const FrameRecord& r) { return r.detected; });
    if (det == sequence_records.end()) return std::nullopt;
    return det->frame - gt->frame;
}

struct OffsetSummary {
    std::map<std::string, std::vector<int>> offsets_by_object;
    long excluded = 0;  // sequences with no detection

    std::map<std::string, double> mean_by_object() const {
        std::map<std::string, double> m;
        for (const auto& [obj, v] : offsets_by_object) {
            if (v.empty()) continue;
            double s = 0;
            for (int o : v) s += o;
            m[obj] = s / static_cast<double>(v.size());
        }
        return m;
    }
};

inline OffsetSummary summarize_offsets(const std::vector<std::vector<FrameRecord>>& per_sequence) {
    OffsetSummary s;
    for (const auto& recs : per_sequence) {
        if (recs.empty() || !std::any_of(recs.begin(), recs.end(), [](const FrameRecord& r) { return r.gt.value_or(false); }))
            continue;
        auto& slot = s.offsets_by_object[recs.front().object_id];
        if (const auto off = first_detection_offset(recs)) slot.push_back(*off);
        else ++s.excluded;
    }
    return s;
}

struct Regression {
    double pearson_r = 0.0;
    double slope = 0.0;
    double intercept = 0.0;
};

/// Pearson correlation and least-squares line y = slope * x + intercept.
inline Regression correlate(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw InvalidInput("correlate: x and y differ in length");
    if (x.size() < 2) throw InvalidInput("correlate: need at least 2 points");
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
    mx /= n, my /= n;
    double sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx, syy += dy * dy, sxy += dx * dy;
    }
    if (!(sxx > 0) || !(syy > 0)) throw InvalidInput("correlate: zero variance");
    Regression r;
    r.slope = sxy / sxx;
    r.intercept = my - r.slope * mx;
    r.pearson_r = sxy / std::sqrt(sxx * syy);
    return r;
}

namespace detail {

inline std::string fmt_double(double v, const char* spec = "%.10g") {
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

inline std::string fmt_pct(double v) { return fmt_double(v, "%.1f"); }

}  // namespace detail

inline void write_frames_csv(const std::vector<FrameRecord>& records, std::ostream& out) {
    out << "sequence_id,frame,epsilon,volume,detected,gt\n";
    for (const auto& r : records)
        out << r.sequence_id << ',' << r.frame << ',' << detail::fmt_double(r.epsilon) << ','
            << detail::fmt_double(r.volume) << ',' << (r.detected ? 1 : 0) << ',' << (r.gt ? (*r.gt ? "1" : "0") : "")
            << '\n';
}

/// Per-group rows mirroring the accuracy tables, followed by the overall row.
inline void write_report_csv(const std::map<std::string, ConfusionMatrix>& groups, const ConfusionMatrix& overall,
                             const std::string& group_header, std::ostream& out) {
    out << group_header << ",frames,tp,tn,fp,fn,tp_pct,tn_pct,fp_pct,fn_pct,accuracy_pct\n";
    auto row = [&out](const std::string& name, const ConfusionMatrix& m) {
        out << name << ',' << m.total() << ',' << m.tp << ',' << m.tn << ',' << m.fp << ',' << m.fn << ','
            << detail::fmt_pct(m.tp_pct()) << ',' << detail::fmt_pct(m.tn_pct()) << ',' << detail::fmt_pct(m.fp_pct())
            << ',' << detail::fmt_pct(m.fn_pct()) << ',' << detail::fmt_pct(m.accuracy_pct()) << '\n';
    };
    for (const auto& [name, m] : groups) row(name, m);
    row(kOverallGroup, overall);
}

/// Metric values that differ from the no-contact sentinel, tagged by ground truth.
inline void export_distributions(const std::vector<FrameRecord>& records, std::ostream& out) {
    out << "metric,gt,value\n";
    for (const auto& r : records) {
        if (!r.gt) throw InvalidInput("export_distributions: record without ground truth");
        if (r.epsilon != -1.0) out << "epsilon," << (*r.gt ? 1 : 0) << ',' << detail::fmt_double(r.epsilon) << '\n';
        if (r.volume != 0.0) out << "volume," << (*r.gt ? 1 : 0) << ',' << detail::fmt_double(r.volume) << '\n';
    }
}

/// Metrics of detected frames only, with frame offsets relative to the first
/// ground-truth-positive frame.
inline void export_timeseries(const std::vector<FrameRecord>& sequence_records, std::ostream& out) {
    const auto gt = std::find_if(sequence_records.begin(), sequence_records.end(),
                                 [](const FrameRecord& r) { return r.gt.value_or(false); });
    if (gt == sequence_records.end()) throw InvalidInput("export_timeseries: sequence has no positive frame");
    out << "frame_offset,epsilon,volume\n";
    for (const auto& r : sequence_records)
        if (r.detected)
            out << r.frame - gt->frame << ',' << detail::fmt_double(r.epsilon) << ',' << detail::fmt_double(r.volume)
                << '\n';
}

/// A published or generated accuracy-table row (percentages as printed).
struct ReportRow {
    std::string group;
    long frames = 0;
    double tp_pct = 0, tn_pct = 0, fp_pct = 0, fn_pct = 0, accuracy_pct = 0;
};

/// Reads accuracy-table CSV rows by header name; the first column is the group.
inline std::vector<ReportRow> parse_report_rows(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("report: empty file");
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(cell);
    }
    auto col = [&](const std::string& name) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw ParseError("report: missing column '" + name + "'");
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t c_frames = col("frames"), c_tp = col("tp_pct"), c_tn = col("tn_pct"), c_fp = col("fp_pct"),
                      c_fn = col("fn_pct"), c_acc = col("accuracy_pct");
    std::vector<ReportRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() != header.size()) throw ParseError("report line " + std::to_string(line_no) + ": column count");
        try {
            rows.push_back({cells[0], std::stol(cells[c_frames]), std::stod(cells[c_tp]), std::stod(cells[c_tn]),
                            std::stod(cells[c_fp]), std::stod(cells[c_fn]), std::stod(cells[c_acc])});
        } catch (const std::exception&) {
            throw ParseError("report line " + std::to_string(line_no) + ": bad number");
        }
    }
    return rows;
}

inline std::vector<ReportRow> load_report_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    return parse_report_rows(in);
}

/// With TP% = TP/P and TN% = TN/N, accuracy = p * TP% + (1 - p) * TN% for the
/// positive fraction p; solved for p.
inline double implied_positive_fraction(const ReportRow& r) {
    if (r.tp_pct == r.tn_pct) throw InvalidInput("implied_positive_fraction: TP% equals TN%");
    return (r.accuracy_pct - r.tn_pct) / (r.tp_pct - r.tn_pct);
}

/// Row sums after one-decimal rounding fall in [99.8, 100.0].
inline bool row_sums_consistent(const ReportRow& r) {
    const double pos = r.tp_pct + r.fn_pct, neg = r.tn_pct + r.fp_pct;
    return pos >= 99.8 - 1e-9 && pos <= 100.0 + 1e-9 && neg >= 99.8 - 1e-9 && neg <= 100.0 + 1e-9;
}

}  // namespace graspq
