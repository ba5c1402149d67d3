#include <cmath>
#include <cstring>
#include <sstream>

#include <gtest/gtest.h>

#include "graspq/config.hpp"
#include "graspq/evaluation.hpp"
#include "graspq/synthetic.hpp"
#include "oracles.hpp"

using namespace graspq;

namespace {

const std::string kReferenceDir = std::string(GRASPQ_SOURCE_DIR) + "/data/reference";

json minimal_sequence_json() {
    json frame = {{"index", 0},
                  {"hand_pose", std::vector<double>(48, 0.0)},
                  {"hand_trans", {0.0, 0.0, 0.0}},
                  {"object_pose", {{"rotation", {1.0, 0.0, 0.0, 0.0}}, {"translation", {0.0, 0.0, 1.0}}}},
                  {"gt_contact", false}};
    return {{"sequence_id", "seq"},
            {"subject_id", "s"},
            {"object_id", "box"},
            {"object_mesh", "box.obj"},
            {"hand_shape",
             {{"global_scale", 1.0},
              {"segment_scales", std::vector<double>(15, 1.0)},
              {"finger_radii", {0.01, 0.008, 0.008, 0.008, 0.008}}}},
            {"frames", json::array({frame})}};
}

std::string parse_error_of(const json& j) {
    try {
        parse_sequence(j);
    } catch (const ParseError& e) {
        return e.what();
    }
    return {};
}

FrameRecord rec(bool gt, bool det, std::string object = "o", std::string subject = "s", int frame = 0) {
    FrameRecord r;
    r.object_id = std::move(object);
    r.subject_id = std::move(subject);
    r.sequence_id = "q";
    r.frame = frame;
    r.gt = gt;
    r.detected = det;
    if (det) r.epsilon = 0.1, r.volume = 0.01;
    return r;
}

// Records of a sequence from (gt, detected) pairs, frames numbered from `first`.
std::vector<FrameRecord> seq_records(const std::vector<std::pair<bool, bool>>& flags, int first = 0) {
    std::vector<FrameRecord> out;
    for (std::size_t i = 0; i < flags.size(); ++i)
        out.push_back(rec(flags[i].first, flags[i].second, "o", "s", first + static_cast<int>(i)));
    return out;
}

int count_lines(const std::string& s) { return static_cast<int>(std::count(s.begin(), s.end(), '\n')); }

struct SuiteRun {
    synthetic::PinchSequence seq;
    MeshRegistry registry;
};

SuiteRun suite_sequence(std::size_t i) {
    SuiteRun r;
    const auto spec = synthetic::suite_specs().at(i);
    r.seq = synthetic::make_pinch_sequence(spec);
    r.registry.add(spec.object_id, r.seq.mesh);
    return r;
}

}  // namespace

TEST(Interchange, MinimalSequence) {
    const Sequence s = parse_sequence(minimal_sequence_json());
    ASSERT_EQ(s.frames.size(), 1u);
    EXPECT_EQ(s.sequence_id, "seq");
    EXPECT_EQ(s.frames[0].hand_pose.theta.size(), 48u);
    EXPECT_EQ(s.frames[0].gt_contact, std::optional<bool>(false));
    EXPECT_TRUE(s.has_ground_truth());
    EXPECT_LT((s.frames[0].object_pose.translation() - Vec3(0, 0, 1)).norm(), 1e-15);
}

TEST(Interchange, ErrorsNameTheField) {
    auto j = minimal_sequence_json();
    j["frames"][0]["hand_pose"] = std::vector<double>(47, 0.0);
    EXPECT_NE(parse_error_of(j).find("frames[0].hand_pose"), std::string::npos);

    j = minimal_sequence_json();
    j["frames"][0].erase("object_pose");
    EXPECT_NE(parse_error_of(j).find("frames[0].object_pose"), std::string::npos);

    j = minimal_sequence_json();
    j["hand_shape"]["finger_radii"] = {0.01, 0.01};
    EXPECT_NE(parse_error_of(j).find("hand_shape"), std::string::npos);

    j = minimal_sequence_json();
    j["frames"][0]["object_pose"]["rotation"] = {0.0, 0.0, 0.0, 0.0};
    EXPECT_NE(parse_error_of(j).find("frames[0].object_pose"), std::string::npos);

    j = minimal_sequence_json();
    j["frames"][0]["gt_contact"] = "yes";
    EXPECT_NE(parse_error_of(j).find("frames[0].gt_contact"), std::string::npos);

    j = minimal_sequence_json();
    j.erase("subject_id");
    EXPECT_NE(parse_error_of(j).find("subject_id"), std::string::npos);
}

TEST(Interchange, FrameIndicesMustIncrease) {
    auto j = minimal_sequence_json();
    j["frames"].push_back(j["frames"][0]);
    EXPECT_NE(parse_error_of(j).find("frames[1].index"), std::string::npos);
    j["frames"][1]["index"] = 3;
    EXPECT_EQ(parse_sequence(j).frames.size(), 2u);
}

TEST(Interchange, MissingGroundTruthMeansInferenceOnly) {
    auto j = minimal_sequence_json();
    j["frames"][0].erase("gt_contact");
    const Sequence s = parse_sequence(j);
    EXPECT_FALSE(s.frames[0].gt_contact.has_value());
    EXPECT_FALSE(s.has_ground_truth());
    j["frames"][0]["gt_contact"] = 1;
    EXPECT_EQ(parse_sequence(j).frames[0].gt_contact, std::optional<bool>(true));
}

TEST(Interchange, SequenceRoundTrip) {
    const auto seq = synthetic::make_pinch_sequence(synthetic::suite_specs()[1]).sequence;
    const Sequence back = parse_sequence(json::parse(sequence_to_json(seq).dump()));
    ASSERT_EQ(back.frames.size(), seq.frames.size());
    EXPECT_EQ(back.hand_shape.finger_radii, seq.hand_shape.finger_radii);
    for (std::size_t i = 0; i < seq.frames.size(); ++i) {
        EXPECT_EQ(back.frames[i].index, seq.frames[i].index);
        EXPECT_EQ(back.frames[i].hand_pose.theta, seq.frames[i].hand_pose.theta);
        EXPECT_EQ(back.frames[i].hand_pose.wrist_translation, seq.frames[i].hand_pose.wrist_translation);
        EXPECT_EQ(back.frames[i].gt_contact, seq.frames[i].gt_contact);
        EXPECT_LT((back.frames[i].object_pose.translation() - seq.frames[i].object_pose.translation()).norm(), 1e-15);
        EXPECT_LT(back.frames[i].object_pose.rotation().angularDistance(seq.frames[i].object_pose.rotation()), 1e-12);
    }
}

TEST(Interchange, SceneParsing) {
    auto j = minimal_sequence_json();
    json scene = {{"object_id", "box"},
                  {"object_mesh", "box.obj"},
                  {"hand_pose", j["frames"][0]["hand_pose"]},
                  {"hand_trans", {0.1, 0.2, 0.3}},
                  {"object_pose", j["frames"][0]["object_pose"]}};
    const Scene s = parse_scene(scene);
    EXPECT_EQ(s.frame.object_mesh_id, "box");
    EXPECT_EQ(s.frame.hand_pose.wrist_translation, Vec3(0.1, 0.2, 0.3));
    scene.erase("hand_pose");
    EXPECT_THROW(parse_scene(scene), ParseError);
}

TEST(Interchange, FileErrors) {
    EXPECT_THROW(load_sequence("/nonexistent/seq.json"), IoError);
    const auto dir = std::filesystem::temp_directory_path() / "graspq_eval_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "broken.json").string();
    std::ofstream(path) << "{\"sequence_id\": ";
    EXPECT_THROW(load_sequence(path), ParseError);
    auto j = minimal_sequence_json();
    j["frames"][0]["hand_pose"] = std::vector<double>(47, 0.0);
    std::ofstream(path) << j.dump();
    try {
        load_sequence(path);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find(path), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("frames[0].hand_pose"), std::string::npos);
    }
}

TEST(RunSequence, FarObjectGivesSentinelEverywhere) {
    auto run = suite_sequence(0);
    Sequence far = run.seq.sequence;
    for (auto& f : far.frames) f.object_pose = Pose(Eigen::Quaterniond::Identity(), Vec3(1, 0, 0)) * f.object_pose;
    const auto records = run_sequence(far, DetectorSettings{}, run.registry);
    ASSERT_EQ(records.size(), far.frames.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        EXPECT_EQ(records[i].frame, far.frames[i].index);
        EXPECT_EQ(records[i].epsilon, -1.0);
        EXPECT_EQ(records[i].volume, 0.0);
        EXPECT_FALSE(records[i].detected);
    }
}

TEST(RunSequence, BitIdenticalReruns) {
    auto run = suite_sequence(3);
    const auto a = run_sequence(run.seq.sequence, DetectorSettings{}, run.registry);
    const auto b = run_sequence(run.seq.sequence, DetectorSettings{}, run.registry);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_EQ(std::memcmp(&a[i].epsilon, &b[i].epsilon, sizeof(double)), 0);
        EXPECT_EQ(std::memcmp(&a[i].volume, &b[i].volume, sizeof(double)), 0);
        EXPECT_EQ(a[i].detected, b[i].detected);
    }
}

TEST(RunSequence, PinchApproachFlipsOnceAtOnset) {
    for (std::size_t i = 0; i < synthetic::suite_specs().size(); ++i) {
        auto run = suite_sequence(i);
        const auto records = run_sequence(run.seq.sequence, DetectorSettings{}, run.registry);
        // approach and hold only: rises never increase before the release
        std::size_t end = 1;
        while (end < run.seq.rises.size() && run.seq.rises[end] <= run.seq.rises[end - 1]) ++end;
        int flips = 0, first = -1;
        for (std::size_t k = 0; k < end; ++k) {
            if (k > 0 && records[k].detected != records[k - 1].detected) ++flips;
            if (records[k].detected && first < 0) first = records[k].frame;
        }
        EXPECT_EQ(flips, 1) << run.seq.sequence.sequence_id;
        EXPECT_FALSE(records.front().detected);
        EXPECT_LE(std::abs(first - run.seq.onset_frame), 1) << run.seq.sequence.sequence_id;
    }
}

TEST(RunSequences, ThreadCountDoesNotChangeResults) {
    std::vector<Sequence> seqs;
    MeshRegistry reg;
    for (const auto& spec : synthetic::suite_specs()) {
        auto s = synthetic::make_pinch_sequence(spec);
        if (!reg.contains(spec.object_id)) reg.add(spec.object_id, s.mesh);
        seqs.push_back(std::move(s.sequence));
    }
    const auto serial = run_sequences(seqs, DetectorSettings{}, reg, 1);
    const auto parallel = run_sequences(seqs, DetectorSettings{}, reg, 4);
    ASSERT_EQ(serial.size(), parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        std::ostringstream a, b;
        write_frames_csv(serial[i], a);
        write_frames_csv(parallel[i], b);
        EXPECT_EQ(a.str(), b.str());
    }
}

TEST(RunSequences, UnknownMeshPropagates) {
    std::vector<Sequence> seqs(3);
    for (auto& s : seqs) {
        s.object_id = "nowhere";
        s.frames.resize(1);
    }
    EXPECT_THROW(run_sequences(seqs, DetectorSettings{}, MeshRegistry{}, 2), ConfigError);
}

TEST(Confusion, FourRecordExample) {
    const std::vector<FrameRecord> r = {rec(true, true), rec(true, false), rec(false, false), rec(false, true)};
    const auto m = overall_confusion(r);
    EXPECT_EQ(m, (ConfusionMatrix{1, 1, 1, 1}));
    EXPECT_DOUBLE_EQ(m.tp_pct(), 50.0);
    EXPECT_DOUBLE_EQ(m.fn_pct(), 50.0);
    EXPECT_DOUBLE_EQ(m.tn_pct(), 50.0);
    EXPECT_DOUBLE_EQ(m.fp_pct(), 50.0);
    EXPECT_DOUBLE_EQ(m.accuracy_pct(), 50.0);
}

TEST(Confusion, AllCorrect) {
    const auto m = overall_confusion({rec(true, true), rec(false, false), rec(true, true)});
    EXPECT_DOUBLE_EQ(m.accuracy_pct(), 100.0);
    EXPECT_DOUBLE_EQ(m.fp_pct(), 0.0);
    EXPECT_DOUBLE_EQ(m.fn_pct(), 0.0);
}

TEST(Confusion, AbsentClassGivesNaN) {
    const auto m = overall_confusion({rec(true, true), rec(true, false)});
    EXPECT_TRUE(std::isnan(m.tn_pct()));
    EXPECT_TRUE(std::isnan(m.fp_pct()));
    EXPECT_DOUBLE_EQ(m.accuracy_pct(), 50.0);
    std::ostringstream out;
    write_report_csv(confusion({rec(true, true)}, GroupBy::object), overall_confusion({rec(true, true)}), "object", out);
    EXPECT_NE(out.str().find(",nan,"), std::string::npos);
}

TEST(Confusion, GroupsAddUpToOverall) {
    auto g = oracle::rng(8);
    std::vector<FrameRecord> records;
    const char* objects[] = {"a", "b", "c"};
    const char* subjects[] = {"1", "2"};
    for (int i = 0; i < 500; ++i)
        records.push_back(rec(g() % 2 == 0, g() % 3 != 0, objects[g() % 3], subjects[g() % 2], i));
    const auto overall = overall_confusion(records);
    for (GroupBy by : {GroupBy::object, GroupBy::subject}) {
        ConfusionMatrix sum;
        for (const auto& [_, m] : confusion(records, by)) {
            sum += m;
            // identities on counts
            EXPECT_DOUBLE_EQ(m.tp_pct() + m.fn_pct(), 100.0);
            EXPECT_DOUBLE_EQ(m.tn_pct() + m.fp_pct(), 100.0);
            EXPECT_DOUBLE_EQ(m.accuracy_pct(), 100.0 * (m.tp + m.tn) / m.total());
        }
        EXPECT_EQ(sum, overall);
    }
    EXPECT_EQ(overall.total(), 500);
}

TEST(Confusion, RequiresGroundTruth) {
    FrameRecord r = rec(true, true);
    r.gt.reset();
    EXPECT_THROW(overall_confusion({r}), InvalidInput);
}

TEST(Sweep, ThresholdsOnlyRemoveDetections) {
    std::vector<FrameRecord> records = {rec(true, true), rec(false, true), rec(true, false)};
    records[0].epsilon = 0.2;
    records[1].epsilon = 0.01, records[1].volume = 0.0;
    const auto sweep = sweep_thresholds(records, {{0.0, 0.0}, {0.05, 1.0}, {1.0, 1.0}});
    EXPECT_EQ(sweep[0].second, overall_confusion(records));
    EXPECT_EQ(sweep[1].second, (ConfusionMatrix{1, 1, 0, 1}));
    EXPECT_EQ(sweep[2].second, (ConfusionMatrix{0, 1, 0, 2}));
}

TEST(Offsets, Examples) {
    std::vector<std::pair<bool, bool>> flags(20, {false, false});
    for (int i = 14; i < 20; ++i) flags[i].first = true;
    for (int i = 10; i < 20; ++i) flags[i].second = true;
    EXPECT_EQ(first_detection_offset(seq_records(flags)), -4);
    EXPECT_EQ(first_detection_offset(seq_records(flags, 100)), -4);

    for (int i = 10; i < 14; ++i) flags[i].second = false;
    EXPECT_EQ(first_detection_offset(seq_records(flags)), 0);

    for (auto& f : flags) f.second = false;
    EXPECT_EQ(first_detection_offset(seq_records(flags)), std::nullopt);

    EXPECT_THROW(first_detection_offset(seq_records({{false, true}})), InvalidInput);
}

TEST(Offsets, SummaryCountsExclusions) {
    auto with = seq_records({{false, false}, {false, true}, {true, true}});
    auto without = seq_records({{false, false}, {true, false}});
    auto unlabeled = seq_records({{false, false}});
    const auto s = summarize_offsets({with, without, unlabeled});
    EXPECT_EQ(s.excluded, 1);
    ASSERT_EQ(s.offsets_by_object.at("o").size(), 1u);
    EXPECT_EQ(s.offsets_by_object.at("o")[0], -1);
    EXPECT_DOUBLE_EQ(s.mean_by_object().at("o"), -1.0);
}

TEST(Correlate, ExactLine) {
    const auto r = correlate({0, 1, 2, 5}, {1, 3, 5, 11});
    EXPECT_NEAR(r.pearson_r, 1.0, 1e-15);
    EXPECT_NEAR(r.slope, 2.0, 1e-15);
    EXPECT_NEAR(r.intercept, 1.0, 1e-15);
}

TEST(Correlate, Errors) {
    EXPECT_THROW(correlate({1, 2, 3}, {4, 4, 4}), InvalidInput);
    EXPECT_THROW(correlate({1}, {2}), InvalidInput);
    EXPECT_THROW(correlate({1, 2}, {2}), InvalidInput);
}

TEST(Correlate, MatchesRawSumFormula) {
    auto g = oracle::rng(99);
    std::vector<double> x, y;
    for (int i = 0; i < 20; ++i) {
        x.push_back(oracle::uniform(g, -5, 5));
        y.push_back(0.7 * x.back() + oracle::uniform(g, -2, 2));
    }
    // r = (n Sxy - Sx Sy) / sqrt((n Sxx - Sx^2)(n Syy - Sy^2))
    long double n = 20, sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (int i = 0; i < 20; ++i) {
        sx += x[i], sy += y[i], sxx += x[i] * (long double)x[i], syy += y[i] * (long double)y[i];
        sxy += x[i] * (long double)y[i];
    }
    const long double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const long double r = (n * sxy - sx * sy) / std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
    const long double intercept = (sy - slope * sx) / n;
    const auto got = correlate(x, y);
    EXPECT_NEAR(got.pearson_r, (double)r, 1e-12);
    EXPECT_NEAR(got.slope, (double)slope, 1e-12);
    EXPECT_NEAR(got.intercept, (double)intercept, 1e-12);
}

TEST(Distributions, SentinelRecordsGiveHeaderOnly) {
    FrameRecord r = rec(false, false);
    std::ostringstream out;
    export_distributions({r, r}, out);
    EXPECT_EQ(out.str(), "metric,gt,value\n");
}

TEST(Distributions, OneContactingRecordGivesTwoRows) {
    FrameRecord r = rec(true, true);
    r.epsilon = 0.05, r.volume = 0.03;
    std::ostringstream out;
    export_distributions({r}, out);
    EXPECT_EQ(out.str(), "metric,gt,value\nepsilon,1,0.05\nvolume,1,0.03\n");
}

TEST(Distributions, RowCountFormula) {
    auto g = oracle::rng(4);
    std::vector<FrameRecord> records;
    int expected = 0;
    for (int i = 0; i < 200; ++i) {
        FrameRecord r = rec(g() % 2 == 0, false);
        switch (g() % 4) {
            case 0: break;  // sentinel
            case 1: r.epsilon = 0.0; break;  // contact, rank deficient
            case 2: r.epsilon = 0.0, r.volume = 0.2; break;
            default: r.epsilon = 0.1, r.volume = 0.3; break;
        }
        expected += (r.epsilon != -1.0) + (r.volume != 0.0);
        records.push_back(r);
    }
    std::ostringstream out;
    export_distributions(records, out);
    EXPECT_EQ(count_lines(out.str()) - 1, expected);
}

TEST(Timeseries, Rules) {
    std::ostringstream none;
    export_timeseries(seq_records({{false, false}, {true, false}}), none);
    EXPECT_EQ(none.str(), "frame_offset,epsilon,volume\n");

    std::ostringstream onset;
    export_timeseries(seq_records({{false, false}, {false, false}, {true, true}, {true, true}}, 7), onset);
    EXPECT_EQ(onset.str(), "frame_offset,epsilon,volume\n0,0.1,0.01\n1,0.1,0.01\n");

    std::ostringstream early;
    auto recs = seq_records({{false, false}, {false, true}, {true, false}, {true, true}});
    export_timeseries(recs, early);
    EXPECT_EQ(early.str(), "frame_offset,epsilon,volume\n-1,0.1,0.01\n1,0.1,0.01\n");
    EXPECT_EQ(early.str().find("-1,-1"), std::string::npos);
}

TEST(Reports, RoundTripAndRowSums) {
    auto g = oracle::rng(12);
    std::vector<FrameRecord> records;
    for (int i = 0; i < 333; ++i) records.push_back(rec(g() % 3 != 0, g() % 5 != 0, g() % 2 ? "x" : "y"));
    std::stringstream out;
    write_report_csv(confusion(records, GroupBy::object), overall_confusion(records), "object", out);
    const auto rows = parse_report_rows(out);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows.back().group, "Overall");
    EXPECT_EQ(rows.back().frames, 333);
    for (const auto& r : rows) EXPECT_TRUE(row_sums_consistent(r)) << r.group;
}

TEST(Reports, FramesCsvLayout) {
    FrameRecord a = rec(true, true);
    a.sequence_id = "s1", a.frame = 4, a.epsilon = 0.25, a.volume = 0.125;
    FrameRecord b = rec(false, false);
    b.gt.reset();
    std::ostringstream out;
    write_frames_csv({a, b}, out);
    EXPECT_EQ(out.str(), "sequence_id,frame,epsilon,volume,detected,gt\ns1,4,0.25,0.125,1,1\nq,0,-1,0,0,\n");
}

TEST(PublishedTables, PositiveFractionIdentity) {
    const ReportRow overall{"Overall", 22659, 91.8, 84.3, 15.7, 8.0, 89.3};
    EXPECT_NEAR(implied_positive_fraction(overall), 2.0 / 3.0, 1e-3);
    for (const char* file : {"published_accuracy_by_object.csv", "published_accuracy_by_subject.csv"}) {
        const auto rows = load_report_rows(kReferenceDir + "/" + file);
        ASSERT_FALSE(rows.empty());
        EXPECT_EQ(rows.back().group, "Overall");
        EXPECT_NEAR(implied_positive_fraction(rows.back()), 0.667, 5e-4);
        long frames = 0;
        for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
            frames += rows[i].frames;
            EXPECT_TRUE(row_sums_consistent(rows[i])) << rows[i].group;
            const double p = implied_positive_fraction(rows[i]);
            EXPECT_GT(p, 0.0) << rows[i].group;
            EXPECT_LT(p, 1.0) << rows[i].group;
        }
        EXPECT_EQ(frames, rows.back().frames);
    }
}

TEST(Reports, ParseErrors) {
    std::istringstream missing("object,frames,tp_pct\nx,1,2\n");
    EXPECT_THROW(parse_report_rows(missing), ParseError);
    std::istringstream bad("object,frames,tp_pct,tn_pct,fp_pct,fn_pct,accuracy_pct\nx,1,2,3,4,5\n");
    EXPECT_THROW(parse_report_rows(bad), ParseError);
    EXPECT_THROW(load_report_rows("/nonexistent.csv"), IoError);
}

TEST(Config, DefaultsAndKeys) {
    const Config empty = parse_config(json::object());
    EXPECT_EQ(empty.detector.contact.cone_edges, ContactParams{}.cone_edges);
    EXPECT_EQ(empty.threads, 0u);
    EXPECT_GE(empty.resolved_threads(), 1u);

    const Config c = parse_config(json::parse(R"({"tolerance": 0.002, "mu": 0.5, "cone_edges": 6,
        "torque_scale": "fixed", "lambda": 12.5, "tau_epsilon": 0.01, "tau_volume": 0.001,
        "mesh_dir": "/m", "threads": 2})"));
    EXPECT_EQ(c.detector.contact.tolerance, 0.002);
    EXPECT_EQ(c.detector.contact.mu, 0.5);
    EXPECT_EQ(c.detector.contact.cone_edges, 6);
    EXPECT_EQ(c.detector.torque.mode, TorqueScale::Mode::fixed);
    EXPECT_EQ(c.detector.torque.lambda, 12.5);
    EXPECT_EQ(c.detector.thresholds.epsilon, 0.01);
    EXPECT_EQ(c.detector.thresholds.volume, 0.001);
    EXPECT_EQ(c.resolved_mesh_dir(), "/m");
    EXPECT_EQ(c.resolved_threads(), 2u);
}

TEST(Config, Rejections) {
    for (const char* text : {R"({"mu": -1})", R"({"cone_edges": 2})", R"({"cone_edges": 4.5})", R"({"tolerance": "x"})",
                             R"({"torque_scale": "other"})", R"({"torque_scale": "fixed", "lambda": 0})",
                             R"({"threads": -1})", R"({"unknown": 1})", "[1, 2]"})
        EXPECT_THROW(parse_config(json::parse(text)), ParseError) << text;
    EXPECT_THROW(load_config("/nonexistent/config.json"), IoError);
}
