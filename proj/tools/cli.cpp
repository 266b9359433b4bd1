#include "cli.hpp"

#include "svg_plot.hpp"

#include "dwid/container.hpp"
#include "dwid/evaluation.hpp"
#include "dwid/phantom.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

namespace dwid::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

std::shared_ptr<spdlog::logger> logger() {
    static const auto log = [] {
        auto l = spdlog::get("dwid");
        if (!l) l = spdlog::stderr_color_mt("dwid");
        l->set_pattern("[%l] %v");
        const char* env = std::getenv("DWID_LOG");
        l->set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
        return l;
    }();
    return log;
}

void write_file(const fs::path& file, const std::string& text) {
    std::ofstream out(file, std::ios::trunc);
    if (!out) throw Error(ErrorCode::io, "cannot open '" + file.string() + "' for writing");
    out << text;
    if (!out) throw Error(ErrorCode::io, "failed writing '" + file.string() + "'");
}

std::string read_file(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error(ErrorCode::io, "cannot open '" + file.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void make_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::io, "cannot create '" + dir.string() + "': " + ec.message());
}

json subset_json(const ReferenceSubset& s) {
    return {{"origin", to_string(s.origin)}, {"fallback", s.fallback}, {"count", s.count()}, {"selected", s.selected}};
}

json params_json(const AwaParams& p) { return {{"patch", p.patch}, {"nu", p.nu}, {"lambda", p.lambda}}; }

std::string lambda_tag(double lambda) {
    std::ostringstream os;
    os << lambda;
    return "lambda_" + os.str();
}

// Options shared by commands that need a reference subset.
struct ReferenceFlags {
    std::string predictions;
    std::string mask;
    bool baseline = false;

    void add_to(CLI::App* app) {
        app->add_option("--predictions", predictions, "prediction interchange JSON for the high-b repetitions");
        app->add_option("--mask", mask, "explicit reference-subset JSON (e.g. one motion state)");
        app->add_flag("--baseline", baseline, "use the built-in statistical classifier");
    }

    ReferenceSource resolve(const SliceSet& slice) const {
        const int chosen = (!predictions.empty()) + (!mask.empty()) + (baseline ? 1 : 0);
        if (chosen > 1) throw Error(ErrorCode::invalid_argument, "choose only one of --predictions, --mask, --baseline");
        ReferenceSource src;
        if (!predictions.empty()) {
            src.origin = SubsetOrigin::external_predictions;
            src.predictions = io::read_predictions(predictions);
        } else if (!mask.empty()) {
            src.origin = SubsetOrigin::explicit_mask;
            src.mask = io::read_mask(mask);
        } else if (baseline) {
            src.origin = SubsetOrigin::baseline_classifier;
        } else if (slice.high_b.labels) {
            src.origin = SubsetOrigin::labels;
        } else {
            throw Error(ErrorCode::invalid_argument,
                        "no reference source: the container has no labels; pass --predictions <json>, --mask <json> or --baseline");
        }
        return src;
    }
};

void add_awa_options(CLI::App* app, AwaParams& p) {
    app->add_option("-P,--patch", p.patch, "patch side length (odd)")->capture_default_str();
    app->add_option("--nu", p.nu, "tolerance factor")->capture_default_str();
    app->add_option("--lambda", p.lambda, "steepness of the weighting window")->capture_default_str();
}

std::vector<SliceInput> load_dataset(const fs::path& root, const std::string& predictions_dir) {
    std::vector<SliceInput> inputs;
    for (const auto& dir : io::list_slices(root)) {
        SliceInput in;
        in.name = dir.filename().string();
        if (in.name.empty()) in.name = dir.parent_path().filename().string();
        in.slice = io::read_stack(dir);
        if (!predictions_dir.empty()) in.predictions = io::read_predictions(fs::path(predictions_dir) / (in.name + ".json"));
        inputs.push_back(std::move(in));
    }
    if (inputs.empty()) throw Error(ErrorCode::io, "no slice containers found under '" + root.string() + "'");
    return inputs;
}

PlotSpec bins_plot(const std::vector<metrics::BinRow>& rows, const std::string& title, const std::string& y_label) {
    PlotSpec plot;
    plot.title = title;
    plot.x_label = "dropout ratio bin centre [%]";
    plot.y_label = y_label;
    std::map<std::string, std::size_t> index;
    for (const auto& r : rows) {
        auto it = index.find(r.method);
        if (it == index.end()) {
            it = index.emplace(r.method, plot.series.size()).first;
            plot.series.push_back({r.method, {}, {}});
        }
        plot.series[it->second].x.push_back(0.5 * (r.bin_low + r.bin_high));
        plot.series[it->second].y.push_back(r.mean);
    }
    return plot;
}

json bins_json(const std::vector<metrics::BinRow>& rows) {
    json arr = json::array();
    for (const auto& r : rows)
        arr.push_back({{"bin_low", r.bin_low}, {"bin_high", r.bin_high}, {"method", r.method}, {"mean", r.mean},
                       {"std", r.std}, {"n", r.n}});
    return arr;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    int slices = 1;
    std::vector<double> fractions;
};

void cmd_simulate(const SimulateArgs& a) {
    phantom::PhantomSpec spec = a.config.empty() ? phantom::default_spec() : phantom::spec_from_json(read_file(a.config));
    if (a.seed) spec.seed = *a.seed;
    if (a.slices < 1) throw Error(ErrorCode::invalid_argument, "--slices must be at least 1");
    const fs::path out(a.out);
    make_dir(out);
    for (int k = 0; k < a.slices; ++k) {
        phantom::PhantomSpec s = spec;
        s.seed = spec.seed + static_cast<std::uint64_t>(k);
        if (!a.fractions.empty())
            for (auto& d : s.dropouts) d.fraction = a.fractions[static_cast<std::size_t>(k) % a.fractions.size()];
        const fs::path dir = a.slices == 1 ? out : out / ([&] {
            std::ostringstream os;
            os << "slice_" << std::setw(3) << std::setfill('0') << k;
            return os.str();
        }());
        const phantom::Phantom ph = phantom::synthesize(s);
        io::write_stack(ph.slice, dir);
        io::write_image(ph.truth_low, s.b_low, dir / "truth_low");
        io::write_image(ph.truth_high, s.b_high, dir / "truth_high");
        write_file(dir / "phantom.json", phantom::spec_to_json(s));
        logger()->info("wrote {}", dir.string());
    }
}

struct AverageArgs {
    std::string in;
    std::string out;
    std::string method = "dlawa";
    AwaParams awa;
    ReferenceFlags ref;
};

void cmd_average(const AverageArgs& a) {
    const SliceSet slice = io::read_stack(a.in);
    MethodSpec spec{method_from_string(a.method), a.awa, std::nullopt};
    if (spec.method == Method::cd || spec.method == Method::dlawa) spec.reference = a.ref.resolve(slice);
    const MethodResult res = run_method(slice, spec);

    const fs::path out(a.out);
    make_dir(out);
    io::write_image(res.image, slice.high_b.b_value, out / "average");
    io::write_volume(res.weights.w, out / "weights");
    const Map noise = relative_noise_map(res.weights);
    io::write_map(noise, out / "noise");
    const AdcMap adc = adc_map(mean_image(slice.low_b), res.image, slice.low_b.b_value, slice.high_b.b_value);
    io::write_map(adc.values, out / "adc");

    json manifest;
    manifest["command"] = "average";
    manifest["version"] = kVersion;
    manifest["input"] = a.in;
    manifest["method"] = to_string(spec.method);
    manifest["params"] = params_json(a.awa);
    manifest["subset"] = subset_json(res.subset);
    if (!a.ref.predictions.empty()) manifest["predictions"] = a.ref.predictions;
    if (!a.ref.mask.empty()) manifest["mask"] = a.ref.mask;
    manifest["mean_relative_noise"] = mean_value(noise);
    manifest["roi_adc"] = roi_mean(adc, effective_roi(slice));
    write_file(out / "manifest.json", manifest.dump(2) + "\n");
    if (res.subset.fallback) logger()->warn("reference source selected no repetition; used all of them");
}

struct EvaluateArgs {
    std::string in;
    std::string out;
    std::vector<std::string> methods{"uniform", "awa", "cd", "dlawa"};
    std::string reference = "labels";
    std::string predictions_dir;
    AwaParams awa;
    int runs = 15;
    std::uint64_t seed = 0;
    int jobs = 1;
};

void cmd_evaluate(const EvaluateArgs& a) {
    EvaluationOptions opt;
    opt.methods.clear();
    for (const auto& m : a.methods) opt.methods.push_back(method_from_string(m));
    if (a.reference == "labels") {
        opt.reference = SubsetOrigin::labels;
    } else if (a.reference == "baseline") {
        opt.reference = SubsetOrigin::baseline_classifier;
    } else if (a.reference == "predictions") {
        opt.reference = SubsetOrigin::external_predictions;
        if (a.predictions_dir.empty())
            throw Error(ErrorCode::invalid_argument, "--reference predictions needs --predictions <dir> with <slice>.json files");
    } else {
        throw Error(ErrorCode::invalid_argument, "unknown reference '" + a.reference + "' (labels, baseline, predictions)");
    }
    opt.awa = a.awa;
    opt.runs = a.runs;
    opt.seed = a.seed;
    opt.jobs = a.jobs;

    const auto inputs = load_dataset(a.in, a.predictions_dir);
    for (const auto& in : inputs)
        if (!in.slice.high_b.labels)
            throw Error(ErrorCode::missing_labels, "slice '" + in.name + "' is unlabelled; evaluation needs labels");
    const EvaluationReport report = evaluate(inputs, opt);
    for (const auto& s : report.skipped) logger()->warn("slice {} has no clean repetition; skipped", s);

    const fs::path out(a.out);
    make_dir(out);
    write_file(out / "records.csv", records_to_csv(report.records));
    write_file(out / "adc_bins.csv", metrics::bins_to_csv(report.adc_bins));
    write_file(out / "adc_bias_bins.csv", metrics::bins_to_csv(report.bias_bins));
    write_file(out / "noise_bins.csv", metrics::bins_to_csv(report.noise_bins));

    write_file(out / "adc.svg", render_svg(bins_plot(report.adc_bins, "ROI ADC per dropout-ratio bin", "ADC [mm^2/s]")));
    write_file(out / "adc_bias.svg",
               render_svg(bins_plot(report.bias_bins, "Relative ROI ADC bias per dropout-ratio bin", "relative bias")));
    PlotSpec noise = bins_plot(report.noise_bins, "Mean relative noise per dropout-ratio bin", "relative noise");
    noise.overlay = std::make_pair(std::string("C&D ideal"), [](double r) { return r < 100.0 ? cd_ideal_noise(r) : NAN; });
    write_file(out / "noise.svg", render_svg(noise));

    json summary;
    summary["command"] = "evaluate";
    summary["version"] = kVersion;
    summary["input"] = a.in;
    summary["slices"] = inputs.size();
    summary["skipped"] = report.skipped;
    summary["runs"] = a.runs;
    summary["seed"] = a.seed;
    summary["methods"] = a.methods;
    summary["reference"] = a.reference;
    summary["params"] = params_json(a.awa);
    summary["records"] = report.records.size();
    summary["adc_bins"] = bins_json(report.adc_bins);
    summary["adc_bias_bins"] = bins_json(report.bias_bins);
    summary["noise_bins"] = bins_json(report.noise_bins);
    write_file(out / "summary.json", summary.dump(2) + "\n");
}

struct SweepArgs {
    std::string in;
    std::string out;
    std::vector<double> lambdas{1.0, 5.0, 25.0};
    AwaParams awa;
    ReferenceFlags ref;
};

void cmd_sweep(const SweepArgs& a) {
    if (a.lambdas.empty()) throw Error(ErrorCode::invalid_argument, "--lambdas needs at least one value");
    const SliceSet slice = io::read_stack(a.in);
    const ReferenceSource src = a.ref.resolve(slice);
    const auto entries = sweep_lambda(slice, a.lambdas, a.awa, src);

    const fs::path out(a.out);
    make_dir(out);
    std::ostringstream csv;
    csv << std::setprecision(10) << "lambda,mean_noise,roi_adc,truth_adc,adc_bias\n";
    json list = json::array();
    bool noise_monotone = true;
    bool bias_monotone = true;
    for (std::size_t k = 0; k < entries.size(); ++k) {
        const auto& e = entries[k];
        const fs::path dir = out / lambda_tag(e.lambda);
        make_dir(dir);
        io::write_volume(e.result.weights.w, dir / "weights");
        io::write_image(e.result.image, slice.high_b.b_value, dir / "average");
        io::write_map(e.adc.values, dir / "adc");
        io::write_map(e.noise, dir / "noise");
        csv << e.lambda << ',' << e.mean_noise << ',' << e.roi_adc << ',';
        if (e.truth_adc) csv << *e.truth_adc;
        csv << ',';
        if (e.adc_bias) csv << *e.adc_bias;
        csv << '\n';
        json j{{"lambda", e.lambda}, {"mean_noise", e.mean_noise}, {"roi_adc", e.roi_adc}};
        if (e.adc_bias) j["adc_bias"] = *e.adc_bias;
        list.push_back(j);
        if (k > 0) {
            const auto& prev = entries[k - 1];
            if (e.lambda >= prev.lambda) {
                noise_monotone = noise_monotone && e.mean_noise >= prev.mean_noise;
                if (e.adc_bias && prev.adc_bias)
                    bias_monotone = bias_monotone && std::abs(*e.adc_bias) <= std::abs(*prev.adc_bias);
            }
        }
    }
    write_file(out / "sweep.csv", csv.str());
    json summary{{"command", "sweep"},
                 {"version", kVersion},
                 {"input", a.in},
                 {"params", params_json(a.awa)},
                 {"subset", subset_json(entries.front().result.subset)},
                 {"entries", list},
                 {"noise_non_decreasing", noise_monotone},
                 {"bias_non_increasing", bias_monotone}};
    write_file(out / "summary.json", summary.dump(2) + "\n");
}

struct ClassifyArgs {
    std::string in;
    std::string out;
};

void cmd_classify(const ClassifyArgs& a) {
    const auto inputs = load_dataset(a.in, "");
    const fs::path out(a.out);
    make_dir(out);
    std::vector<double> probs;
    std::vector<Label> labels;
    for (const auto& in : inputs) {
        const PredictionRecord pred = baseline_classifier(in.slice);
        io::write_predictions(pred, out / (in.name + ".json"));
        if (in.slice.high_b.labels) {
            probs.insert(probs.end(), pred.probs.begin(), pred.probs.end());
            labels.insert(labels.end(), in.slice.high_b.labels->begin(), in.slice.high_b.labels->end());
        }
    }
    json summary{{"command", "classify"}, {"version", kVersion}, {"input", a.in}, {"slices", inputs.size()}};
    if (!probs.empty()) {
        const auto roc = metrics::roc_curve(probs, labels);
        write_file(out / "roc.csv", metrics::roc_to_csv(roc));
        summary["positives"] = roc.positives;
        summary["negatives"] = roc.negatives;
        if (roc.positives > 0 && roc.negatives > 0) {
            summary["auc"] = metrics::auc(roc);
            const double t = metrics::select_threshold(roc);
            summary["selected_threshold"] = t;
            std::vector<bool> called;
            for (double p : probs) called.push_back(p >= t);
            const auto s = metrics::classification_scores(called, labels);
            summary["accuracy"] = s.accuracy;
            const auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
            summary["sensitivity"] = opt(s.sensitivity);
            summary["specificity"] = opt(s.specificity);
            summary["precision"] = opt(s.precision);
        }
    }
    write_file(out / "summary.json", summary.dump(2) + "\n");
}

struct HistogramArgs {
    std::string in;
    std::string out;
};

void cmd_histogram(const HistogramArgs& a) {
    const auto inputs = load_dataset(a.in, "");
    std::vector<int> counts(10, 0);
    int majority = 0;
    for (const auto& in : inputs) {
        const auto& labels = in.slice.high_b.labels;
        if (!labels) throw Error(ErrorCode::missing_labels, "slice '" + in.name + "' is unlabelled");
        const int n = static_cast<int>(labels->size());
        const int clean = static_cast<int>(std::count(labels->begin(), labels->end(), Label::clean));
        const double ratio = dropout_ratio(clean, n);
        counts[static_cast<std::size_t>(metrics::bin_index(ratio))] += 1;
        majority += ratio > 50.0 ? 1 : 0;
    }
    std::ostringstream csv;
    csv << "bin_low,bin_high,count\n";
    for (int b = 0; b < 10; ++b) csv << b * 10 << ',' << b * 10 + 10 << ',' << counts[b] << '\n';
    const fs::path out(a.out);
    if (out.has_parent_path()) make_dir(out.parent_path());
    write_file(out, csv.str());
    logger()->info("{} slices, {} with a majority of corrupted repetitions", inputs.size(), majority);
}

} // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"Dropout-compensating weighted averaging for multi-repetition diffusion-weighted images", "dwid"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "synthesise labelled phantom slices");
    s->add_option("--config", sim.config, "phantom JSON config (default geometry when omitted)");
    s->add_option("--seed", sim.seed, "override the config seed");
    s->add_option("--slices", sim.slices, "number of slices (seeds seed, seed+1, ...)")->capture_default_str();
    s->add_option("--fractions", sim.fractions, "dropout fractions cycled over slices")->delimiter(',');
    s->add_option("--out", sim.out, "output container (or dataset directory)")->required();

    AverageArgs avg;
    auto* av = app.add_subcommand("average", "average one slice with a chosen method");
    av->add_option("--in", avg.in, "slice container")->required();
    av->add_option("--method", avg.method, "uniform | awa | cd | dlawa")->capture_default_str();
    add_awa_options(av, avg.awa);
    avg.ref.add_to(av);
    av->add_option("--out", avg.out, "output directory")->required();

    EvaluateArgs ev;
    auto* e = app.add_subcommand("evaluate", "random-subset protocol with ADC and noise statistics");
    e->add_option("--in", ev.in, "dataset directory (or a single slice container)")->required();
    e->add_option("--runs", ev.runs, "random input subsets per slice")->capture_default_str();
    e->add_option("--seed", ev.seed, "base seed")->capture_default_str();
    e->add_option("--methods", ev.methods, "methods to compare")->delimiter(',');
    e->add_option("--reference", ev.reference, "cd/dlawa reference: labels | baseline | predictions")->capture_default_str();
    e->add_option("--predictions", ev.predictions_dir, "directory with <slice>.json prediction files");
    add_awa_options(e, ev.awa);
    e->add_option("--jobs", ev.jobs, "parallel slices")->capture_default_str();
    e->add_option("--out", ev.out, "output directory")->required();

    SweepArgs sw;
    auto* w = app.add_subcommand("sweep", "DLAWA over a list of lambda values");
    w->add_option("--in", sw.in, "slice container")->required();
    w->add_option("--lambdas", sw.lambdas, "comma separated lambda values")->delimiter(',')->capture_default_str();
    add_awa_options(w, sw.awa);
    sw.ref.add_to(w);
    w->add_option("--out", sw.out, "output directory")->required();

    ClassifyArgs cl;
    auto* c = app.add_subcommand("classify", "baseline classifier predictions, ROC and scores");
    c->add_option("--in", cl.in, "dataset directory or slice container")->required();
    c->add_option("--out", cl.out, "output directory")->required();

    HistogramArgs hi;
    auto* h = app.add_subcommand("histogram", "histogram of per-slice dropout ratios (10 % bins)");
    h->add_option("--in", hi.in, "dataset directory")->required();
    h->add_option("--out", hi.out, "output CSV file")->required();

    std::vector<std::string> argv_store{"dwid"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (s->parsed()) cmd_simulate(sim);
        if (av->parsed()) cmd_average(avg);
        if (e->parsed()) cmd_evaluate(ev);
        if (w->parsed()) cmd_sweep(sw);
        if (c->parsed()) cmd_classify(cl);
        if (h->parsed()) cmd_histogram(hi);
    } catch (const Error& err) {
        logger()->error("{}: {}", to_string(err.code()), err.what());
        return err.is_io() ? kExitIo : kExitValidation;
    } catch (const fs::filesystem_error& err) {
        logger()->error("I/O error: {}", err.what());
        return kExitIo;
    } catch (const std::exception& err) {
        logger()->error("{}", err.what());
        return kExitValidation;
    }
    return kExitOk;
}

} // namespace dwid::cli
