// graspq: hand-object contact detection from grasp quality metrics.
//
//   graspq detect --scene <file> [--config <file>]
//   graspq eval   --dataset <dir> --out <dir> [--config <file>] [--threads N]
//   graspq hull   --wrenches <csv>
//   graspq make-suite --out <dir>
//
// Exit codes: 0 success, 1 usage, 2 input, 3 numerical.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "graspq/graspq.hpp"
#include "graspq/synthetic.hpp"

namespace fs = std::filesystem;
using namespace graspq;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kInput = 2, kNumerical = 3 };

Config config_from(const std::string& path) { return path.empty() ? Config{} : load_config(path); }

std::ofstream open_out(const fs::path& p) {
    std::ofstream out(p);
    if (!out) throw IoError("cannot write '" + p.string() + "'");
    return out;
}

int cmd_detect(const std::string& scene_path, const std::string& config_path) {
    const Config cfg = config_from(config_path);
    const Scene scene = load_scene(scene_path);
    MeshRegistry registry;
    const auto& model = registry.load(scene.object_id, resolve_mesh_path(scene.object_mesh, cfg.resolved_mesh_dir(), scene_path));
    if (model.mesh.dropped_faces > 0)
        std::cerr << "warning: " << model.mesh.dropped_faces << " degenerate faces dropped from " << scene.object_mesh
                  << '\n';
    const ContactDecision d = evaluate_frame(scene.frame, cfg.detector, registry, cfg.skeleton());
    const nlohmann::json out = {{"epsilon", d.metrics.epsilon},
                                {"volume", d.metrics.volume},
                                {"in_contact", d.in_contact},
                                {"contact_count", d.contact_count}};
    std::cout << out.dump() << '\n';
    return kOk;
}

int cmd_hull(const std::string& wrench_path) {
    const std::vector<Vec6> wrenches = load_wrench_csv(wrench_path);
    if (wrenches.empty()) throw ParseError(wrench_path + ": no wrench rows");
    const WrenchHull hull = convex_hull_6d(wrenches);
    const nlohmann::json out = {{"epsilon", epsilon_metric(hull)},
                                {"volume", volume_metric(hull)},
                                {"facet_count", hull.facets.size()},
                                {"full_dimensional", hull.full_dimensional}};
    std::cout << out.dump() << '\n';
    return kOk;
}

int cmd_eval(const std::string& dataset, const std::string& config_path, const std::string& out_dir, unsigned threads) {
    Config cfg = config_from(config_path);
    if (threads > 0) cfg.threads = threads;
    if (!fs::is_directory(dataset)) throw IoError("dataset '" + dataset + "' is not a directory");

    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dataset))
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw IoError("dataset '" + dataset + "' contains no sequence files");

    std::vector<Sequence> seqs;
    MeshRegistry registry;
    const std::string mesh_dir = cfg.resolved_mesh_dir();
    for (const auto& f : files) {
        seqs.push_back(load_sequence(f.string()));
        const Sequence& s = seqs.back();
        if (!registry.contains(s.object_id)) {
            const auto& model = registry.load(s.object_id, resolve_mesh_path(s.object_mesh, mesh_dir, f.string()));
            if (model.mesh.dropped_faces > 0)
                std::cerr << "warning: " << model.mesh.dropped_faces << " degenerate faces dropped from "
                          << s.object_mesh << '\n';
        }
    }

    const auto results = run_sequences(seqs, cfg.detector, registry, cfg.resolved_threads(), cfg.skeleton());

    fs::create_directories(out_dir);
    const fs::path out(out_dir);
    std::vector<FrameRecord> all;
    for (const auto& r : results) all.insert(all.end(), r.begin(), r.end());
    {
        auto f = open_out(out / "frames.csv");
        write_frames_csv(all, f);
    }

    std::vector<FrameRecord> labeled;
    std::vector<std::vector<FrameRecord>> labeled_seqs;
    for (std::size_t i = 0; i < seqs.size(); ++i)
        if (seqs[i].has_ground_truth()) {
            labeled.insert(labeled.end(), results[i].begin(), results[i].end());
            labeled_seqs.push_back(results[i]);
        }
    if (labeled.empty()) {
        std::cerr << "notice: no ground-truth labels in dataset; wrote frames.csv only\n";
        return kOk;
    }
    if (labeled_seqs.size() < seqs.size())
        std::cerr << "notice: " << seqs.size() - labeled_seqs.size()
                  << " sequence(s) without ground truth excluded from reports\n";

    const ConfusionMatrix overall = overall_confusion(labeled);
    {
        auto f = open_out(out / "report_by_object.csv");
        write_report_csv(confusion(labeled, GroupBy::object), overall, "object", f);
    }
    {
        auto f = open_out(out / "report_by_subject.csv");
        write_report_csv(confusion(labeled, GroupBy::subject), overall, "subject", f);
    }
    {
        auto f = open_out(out / "distributions.csv");
        export_distributions(labeled, f);
    }
    for (const auto& recs : labeled_seqs) {
        if (!std::any_of(recs.begin(), recs.end(), [](const FrameRecord& r) { return *r.gt; })) continue;
        auto f = open_out(out / ("timeseries_" + recs.front().sequence_id + ".csv"));
        export_timeseries(recs, f);
    }

    const OffsetSummary offsets = summarize_offsets(labeled_seqs);
    const auto by_object = confusion(labeled, GroupBy::object);
    const auto means = offsets.mean_by_object();
    {
        auto f = open_out(out / "offsets_by_object.csv");
        f << "object,sequences,mean_offset,fp_pct\n";
        for (const auto& [obj, mean] : means)
            f << obj << ',' << offsets.offsets_by_object.at(obj).size() << ',' << detail::fmt_double(mean) << ','
              << detail::fmt_pct(by_object.at(obj).fp_pct()) << '\n';
    }

    std::cout << "Overall frames=" << overall.total() << " TP%=" << detail::fmt_pct(overall.tp_pct())
              << " TN%=" << detail::fmt_pct(overall.tn_pct()) << " FP%=" << detail::fmt_pct(overall.fp_pct())
              << " FN%=" << detail::fmt_pct(overall.fn_pct()) << " accuracy%=" << detail::fmt_pct(overall.accuracy_pct())
              << '\n';
    if (offsets.excluded > 0) std::cout << "sequences without any detection: " << offsets.excluded << '\n';
    std::vector<double> xs, ys;
    for (const auto& [obj, mean] : means) {
        const double fp = by_object.at(obj).fp_pct();
        if (std::isnan(fp)) continue;
        xs.push_back(mean);
        ys.push_back(fp);
    }
    try {
        const Regression reg = correlate(xs, ys);
        std::cout << "offset vs FP%: r=" << detail::fmt_double(reg.pearson_r, "%.4f")
                  << " slope=" << detail::fmt_double(reg.slope, "%.4f")
                  << " intercept=" << detail::fmt_double(reg.intercept, "%.4f") << '\n';
    } catch (const InvalidInput&) {
        std::cout << "offset vs FP%: not enough variation for a regression\n";
    }
    return kOk;
}

int cmd_make_suite(const std::string& out_dir) {
    fs::create_directories(out_dir);
    std::map<std::string, bool> meshes_written;
    for (const auto& spec : synthetic::suite_specs()) {
        const auto seq = synthetic::make_pinch_sequence(spec);
        write_json_file(sequence_to_json(seq.sequence), (fs::path(out_dir) / (spec.sequence_id + ".json")).string());
        if (!meshes_written[spec.object_mesh]) {
            save_mesh(seq.mesh, (fs::path(out_dir) / spec.object_mesh).string());
            meshes_written[spec.object_mesh] = true;
        }
        std::cout << spec.sequence_id << ": " << seq.sequence.frames.size() << " frames, contact onset at frame "
                  << seq.onset_frame << '\n';
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hand-object contact detection from Ferrari-Canny grasp quality metrics", "graspq"};
    app.require_subcommand(1);

    std::string scene, config, dataset, out_dir, wrenches;
    unsigned threads = 0;

    auto* detect = app.add_subcommand("detect", "Evaluate one scene and print the metrics as JSON");
    detect->add_option("--scene", scene, "Scene file (JSON)")->required();
    detect->add_option("--config", config, "Config file (JSON)");

    auto* eval = app.add_subcommand("eval", "Evaluate a dataset of labeled sequences and write CSV reports");
    eval->add_option("--dataset", dataset, "Directory of sequence files (*.json)")->required();
    eval->add_option("--out", out_dir, "Output directory")->required();
    eval->add_option("--config", config, "Config file (JSON)");
    eval->add_option("--threads", threads, "Worker threads (default: config, then all cores)");

    auto* hull = app.add_subcommand("hull", "Compute hull metrics for a CSV of 6-D wrenches");
    hull->add_option("--wrenches", wrenches, "CSV with columns fx,fy,fz,tx,ty,tz")->required();

    auto* suite = app.add_subcommand("make-suite", "Write the synthetic pinch suite (sequences + meshes)");
    suite->add_option("--out", out_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return kUsage;
    }

    try {
        if (*detect) return cmd_detect(scene, config);
        if (*eval) return cmd_eval(dataset, config, out_dir, threads);
        if (*hull) return cmd_hull(wrenches);
        if (*suite) return cmd_make_suite(out_dir);
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kNumerical;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInput;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kInput;
    }
    return kUsage;
}
