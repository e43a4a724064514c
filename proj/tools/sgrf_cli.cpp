// sgrf command-line front end. Orchestrates the pipeline stages through the
// C API only: synth, preprocess, smote, select, train, predict, pipeline.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "sgrf/c_api.h"
#include "sha256.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitComputeError = 1;
constexpr int kExitInputError = 2;

struct CliError : std::runtime_error {
    int exit_code;
    CliError(const std::string& message, int code) : std::runtime_error(message), exit_code(code) {}
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CliError("cannot open file: " + path, kExitInputError);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CliError("cannot write file: " + path.string(), kExitInputError);
    out << content;
    if (!out) throw CliError("write failed: " + path.string(), kExitInputError);
}

void check(sgrf_status status) {
    if (status == SGRF_STATUS_OK) return;
    int code = status == SGRF_STATUS_INPUT_ERROR ? kExitInputError : kExitComputeError;
    throw CliError(sgrf_last_error(), code);
}

// Owning wrapper for strings handed out by the library.
struct OutString {
    char* ptr = nullptr;
    ~OutString() { sgrf_string_free(ptr); }
    std::string str() const { return ptr ? std::string(ptr) : std::string(); }
};

struct DatasetHandle {
    sgrf_dataset* ptr = nullptr;
    ~DatasetHandle() { sgrf_dataset_free(ptr); }
};

struct ForestHandle {
    sgrf_forest* ptr = nullptr;
    ~ForestHandle() { sgrf_forest_free(ptr); }
};

std::string now_utc() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Written alongside every command's outputs; records enough to reproduce the
// run (inputs by digest, the resolved configuration, the seed).
struct Manifest {
    std::string command;
    ordered_json config = ordered_json::object();
    ordered_json inputs = ordered_json::array();
    std::vector<std::string> outputs;

    void add_input(const std::string& path, const std::string& content) {
        inputs.push_back({{"path", path}, {"sha256", sha256::hex_digest(content)}});
    }

    void write(const fs::path& out_dir) {
        ordered_json j;
        j["tool"] = "sgrf";
        j["version"] = sgrf_version();
        j["command"] = command;
        j["created_utc"] = now_utc();
        j["config"] = config;
        j["inputs"] = inputs;
        j["outputs"] = outputs;
        write_file(out_dir / "manifest.json", j.dump(2) + "\n");
    }
};

ordered_json parse_json(const std::string& text, const std::string& what) {
    try {
        return ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw CliError(what + ": " + e.what(), kExitInputError);
    }
}

void require_file(const std::string& path, const std::string& what) {
    if (path.empty()) throw CliError("missing required " + what, kExitInputError);
    if (!fs::exists(path)) throw CliError(what + " not found: " + path, kExitInputError);
}

struct CommonArgs {
    std::string data_path;
    std::string schema_path;
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;  // 0 = not set
};

ordered_json load_config(const CommonArgs& args, Manifest& manifest) {
    ordered_json config = ordered_json::object();
    if (!args.config_path.empty()) {
        require_file(args.config_path, "config file");
        std::string text = read_file(args.config_path);
        manifest.add_input(args.config_path, text);
        config = parse_json(text, "config file " + args.config_path);
        if (!config.is_object())
            throw CliError("config file must hold a JSON object", kExitInputError);
    }
    if (args.seed_set) config["seed"] = args.seed;
    if (args.threads > 0) config["threads"] = args.threads;
    return config;
}

DatasetHandle load_dataset(const CommonArgs& args, Manifest& manifest) {
    require_file(args.data_path, "data file (--data)");
    require_file(args.schema_path, "schema file (--schema)");
    std::string data_text = read_file(args.data_path);
    std::string schema_text = read_file(args.schema_path);
    manifest.add_input(args.data_path, data_text);
    manifest.add_input(args.schema_path, schema_text);
    DatasetHandle ds;
    check(sgrf_dataset_from_csv(data_text.c_str(), schema_text.c_str(), &ds.ptr));
    return ds;
}

void emit(const fs::path& out_dir, const std::string& name, const std::string& content,
          Manifest& manifest) {
    write_file(out_dir / name, content);
    manifest.outputs.push_back(name);
}

double number_at(const ordered_json& j, const std::string& key) {
    return j.at(key).get<double>();
}

std::string fmt(double v) { return ordered_json(v).dump(); }

// ---- subcommands ----

int cmd_synth(const CommonArgs& args) {
    Manifest manifest;
    manifest.command = "synth";
    require_file(args.config_path, "generator config (--config)");
    ordered_json config = load_config(args, manifest);
    manifest.config = config;

    DatasetHandle ds;
    check(sgrf_dataset_generate(config.dump().c_str(), &ds.ptr));
    OutString csv, schema, info;
    check(sgrf_dataset_to_csv(ds.ptr, &csv.ptr));
    check(sgrf_dataset_schema(ds.ptr, &schema.ptr));
    check(sgrf_dataset_info(ds.ptr, &info.ptr));

    fs::create_directories(args.out_dir);
    emit(args.out_dir, "data.csv", csv.str(), manifest);
    emit(args.out_dir, "schema.json", schema.str(), manifest);
    emit(args.out_dir, "dataset_info.json", info.str(), manifest);
    manifest.write(args.out_dir);
    std::cout << "wrote " << (fs::path(args.out_dir) / "data.csv").string() << "\n";
    return 0;
}

int cmd_preprocess(const CommonArgs& args) {
    Manifest manifest;
    manifest.command = "preprocess";
    DatasetHandle ds = load_dataset(args, manifest);

    DatasetHandle prepped;
    OutString summary;
    check(sgrf_dataset_preprocess(ds.ptr, &prepped.ptr, &summary.ptr));
    OutString csv, schema;
    check(sgrf_dataset_to_csv(prepped.ptr, &csv.ptr));
    check(sgrf_dataset_schema(prepped.ptr, &schema.ptr));

    fs::create_directories(args.out_dir);
    emit(args.out_dir, "preprocessed.csv", csv.str(), manifest);
    emit(args.out_dir, "schema.json", schema.str(), manifest);
    emit(args.out_dir, "preprocess_summary.json", summary.str(), manifest);
    manifest.write(args.out_dir);
    std::cout << "wrote " << (fs::path(args.out_dir) / "preprocessed.csv").string() << "\n";
    return 0;
}

int cmd_smote(const CommonArgs& args, int smote_k) {
    Manifest manifest;
    manifest.command = "smote";
    ordered_json config = load_config(args, manifest);
    ordered_json smote_cfg =
        config.contains("smote") ? config.at("smote") : ordered_json::object();
    if (config.contains("seed")) smote_cfg["seed"] = config.at("seed");
    if (smote_k > 0) smote_cfg["k_neighbors"] = smote_k;
    manifest.config = smote_cfg;

    DatasetHandle ds = load_dataset(args, manifest);
    DatasetHandle oversampled;
    OutString provenance, summary;
    check(sgrf_smote(ds.ptr, smote_cfg.dump().c_str(), &oversampled.ptr, &provenance.ptr,
                     &summary.ptr));
    OutString csv, schema;
    check(sgrf_dataset_to_csv(oversampled.ptr, &csv.ptr));
    check(sgrf_dataset_schema(oversampled.ptr, &schema.ptr));

    fs::create_directories(args.out_dir);
    emit(args.out_dir, "oversampled.csv", csv.str(), manifest);
    emit(args.out_dir, "provenance.csv", provenance.str(), manifest);
    emit(args.out_dir, "schema.json", schema.str(), manifest);
    emit(args.out_dir, "smote_summary.json", summary.str(), manifest);
    manifest.write(args.out_dir);
    std::cout << "wrote " << (fs::path(args.out_dir) / "oversampled.csv").string() << "\n";
    return 0;
}

int cmd_select(const CommonArgs& args) {
    Manifest manifest;
    manifest.command = "select";
    ordered_json config = load_config(args, manifest);
    manifest.config = config;

    DatasetHandle ds = load_dataset(args, manifest);
    OutString selection, history;
    check(sgrf_select_features(ds.ptr, config.dump().c_str(), &selection.ptr, &history.ptr));

    fs::create_directories(args.out_dir);
    emit(args.out_dir, "selection.json", selection.str(), manifest);
    emit(args.out_dir, "ga_history.csv", history.str(), manifest);
    manifest.write(args.out_dir);
    std::cout << "wrote " << (fs::path(args.out_dir) / "selection.json").string() << "\n";
    return 0;
}

int cmd_train(const CommonArgs& args, const std::string& mask_path) {
    Manifest manifest;
    manifest.command = "train";
    ordered_json config = load_config(args, manifest);
    manifest.config = config;

    std::string mask_text;
    if (!mask_path.empty()) {
        require_file(mask_path, "mask file (--mask)");
        mask_text = read_file(mask_path);
        manifest.add_input(mask_path, mask_text);
    }

    DatasetHandle ds = load_dataset(args, manifest);
    ForestHandle forest;
    check(sgrf_forest_train(ds.ptr, config.dump().c_str(),
                            mask_text.empty() ? nullptr : mask_text.c_str(), &forest.ptr));
    OutString model;
    check(sgrf_forest_save(forest.ptr, &model.ptr));
    OutString oob;
    check(sgrf_forest_oob(forest.ptr, ds.ptr, &oob.ptr));

    fs::create_directories(args.out_dir);
    emit(args.out_dir, "model.json", model.str(), manifest);
    emit(args.out_dir, "oob.json", oob.str(), manifest);
    manifest.write(args.out_dir);
    std::cout << "wrote " << (fs::path(args.out_dir) / "model.json").string() << "\n";
    return 0;
}

int cmd_predict(const CommonArgs& args, const std::string& model_path) {
    Manifest manifest;
    manifest.command = "predict";
    require_file(model_path, "model file (--model)");
    std::string model_text = read_file(model_path);
    manifest.add_input(model_path, model_text);

    DatasetHandle ds = load_dataset(args, manifest);
    ForestHandle forest;
    check(sgrf_forest_load(model_text.c_str(), &forest.ptr));
    OutString predictions;
    check(sgrf_forest_predict(forest.ptr, ds.ptr, &predictions.ptr));

    fs::create_directories(args.out_dir);
    emit(args.out_dir, "predictions.csv", predictions.str(), manifest);
    manifest.write(args.out_dir);
    std::cout << "wrote " << (fs::path(args.out_dir) / "predictions.csv").string() << "\n";
    return 0;
}

std::string roc_csv_from_report(const ordered_json& report) {
    std::string out = "fpr,tpr\n";
    for (const auto& p : report.at("roc")) {
        out += fmt(p.at(0).get<double>());
        out += ',';
        out += fmt(p.at(1).get<double>());
        out += '\n';
    }
    return out;
}

std::string ga_history_csv_from_report(const ordered_json& report) {
    std::string out = "fold,generation,best,mean\n";
    for (const auto& fold : report.at("folds")) {
        if (!fold.contains("ga_history")) continue;
        const auto& hist = fold.at("ga_history");
        for (std::size_t g = 0; g < hist.size(); ++g) {
            out += fold.at("fold").dump();
            out += ',';
            out += std::to_string(g);
            out += ',';
            out += fmt(hist.at(g).at(0).get<double>());
            out += ',';
            out += fmt(hist.at(g).at(1).get<double>());
            out += '\n';
        }
    }
    return out;
}

int cmd_pipeline(const CommonArgs& args, const std::string& mode_flag, int folds, int smote_k,
                 const std::string& smote_scope) {
    Manifest manifest;
    manifest.command = "pipeline";
    ordered_json config = load_config(args, manifest);
    if (folds > 0) config["cv_folds"] = folds;
    if (smote_k > 0) {
        if (!config.contains("smote")) config["smote"] = ordered_json::object();
        config["smote"]["k_neighbors"] = smote_k;
    }
    if (!smote_scope.empty()) config["smote_scope"] = smote_scope;

    std::vector<std::string> modes;
    if (!mode_flag.empty()) {
        modes.push_back(mode_flag);
    } else if (config.contains("modes")) {
        modes = config.at("modes").get<std::vector<std::string>>();
    } else if (config.contains("mode")) {
        modes.push_back(config.at("mode").get<std::string>());
    } else {
        modes = {"rf_only", "smote_rf", "smote_ga_rf"};
    }
    for (const auto& m : modes) {
        if (m != "rf_only" && m != "smote_rf" && m != "smote_ga_rf")
            throw CliError("unknown pipeline mode: '" + m + "'", kExitInputError);
    }
    manifest.config = config;
    manifest.config["modes"] = modes;

    DatasetHandle ds = load_dataset(args, manifest);

    // Run every mode before writing anything.
    std::vector<std::pair<std::string, ordered_json>> reports;
    for (const auto& mode : modes) {
        ordered_json mode_config = config;
        mode_config.erase("modes");
        mode_config["mode"] = mode;
        OutString report;
        check(sgrf_run_pipeline(ds.ptr, mode_config.dump().c_str(), &report.ptr));
        reports.emplace_back(mode, parse_json(report.str(), "report"));
    }

    fs::create_directories(args.out_dir);
    std::string comparison;
    for (const auto& [mode, report] : reports) {
        emit(args.out_dir, "report_" + mode + ".json", report.dump(2) + "\n", manifest);
        emit(args.out_dir, "roc_" + mode + ".csv", roc_csv_from_report(report), manifest);
        if (mode == "smote_ga_rf") {
            ordered_json sel;
            sel["consensus"] = report.at("selected_features");
            sel["per_fold"] = ordered_json::array();
            for (const auto& fold : report.at("folds"))
                sel["per_fold"].push_back(fold.at("selected_features"));
            emit(args.out_dir, "selected_features.json", sel.dump(2) + "\n", manifest);
            emit(args.out_dir, "ga_history_" + mode + ".csv",
                 ga_history_csv_from_report(report), manifest);
        }

        if (comparison.empty()) {
            std::string pos = report.at("positive_label").get<std::string>();
            const auto& labels = report.at("label_names");
            std::string neg;
            for (const auto& l : labels) {
                if (l.get<std::string>() != pos) neg = l.get<std::string>();
            }
            comparison = "mode,accuracy,sensitivity_" + pos + ",sensitivity_" + neg +
                         ",specificity_" + pos + ",specificity_" + neg + ",f1_" + pos + ",f1_" +
                         neg + ",g_mean,auc\n";
        }
        int pos_idx = report.at("positive_class").get<int>();
        int neg_idx = 1 - pos_idx;
        const auto& per_class = report.at("per_class");
        comparison += mode;
        comparison += ',' + fmt(number_at(report, "accuracy"));
        for (const char* metric : {"sensitivity", "specificity", "f1"}) {
            comparison += ',' + fmt(number_at(per_class.at(pos_idx), metric));
            comparison += ',' + fmt(number_at(per_class.at(neg_idx), metric));
        }
        comparison += ',' + fmt(number_at(report, "g_mean"));
        comparison += ',' + fmt(number_at(report, "auc"));
        comparison += '\n';
    }
    emit(args.out_dir, "comparison.csv", comparison, manifest);
    manifest.write(args.out_dir);

    for (const auto& [mode, report] : reports) {
        std::cout << mode << ": accuracy=" << fmt(number_at(report, "accuracy"))
                  << " auc=" << fmt(number_at(report, "auc"))
                  << " g_mean=" << fmt(number_at(report, "g_mean")) << "\n";
    }
    return 0;
}

void add_common(CLI::App* cmd, CommonArgs& args, bool with_data, bool with_config) {
    if (with_data) {
        cmd->add_option("--data", args.data_path, "input data CSV");
        cmd->add_option("--schema", args.schema_path, "schema JSON");
    }
    if (with_config) cmd->add_option("--config", args.config_path, "configuration JSON");
    cmd->add_option("--out", args.out_dir, "output directory")->required();
    auto* seed = cmd->add_option("--seed", args.seed, "seed override");
    cmd->add_option("--threads", args.threads, "worker thread cap (does not change results)");
    cmd->parse_complete_callback([seed, &args]() { args.seed_set = seed->count() > 0; });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"imbalanced tabular classification: SMOTE + GA feature selection + random forest"};
    app.set_version_flag("--version", sgrf_version());
    app.require_subcommand(1);

    CommonArgs synth_args, pre_args, smote_args, select_args, train_args, predict_args,
        pipe_args;
    int smote_k = 0, pipe_smote_k = 0, pipe_folds = 0;
    std::string mask_path, model_path, pipe_mode, pipe_scope;

    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    add_common(synth, synth_args, false, true);

    auto* preprocess =
        app.add_subcommand("preprocess", "impute, rescale and drop degenerate columns");
    add_common(preprocess, pre_args, true, false);

    auto* smote = app.add_subcommand("smote", "oversample the minority class");
    add_common(smote, smote_args, true, true);
    smote->add_option("--smote-k", smote_k, "neighbor count override");

    auto* select = app.add_subcommand("select", "GA wrapper feature selection");
    add_common(select, select_args, true, true);

    auto* train = app.add_subcommand("train", "fit a random forest");
    add_common(train, train_args, true, true);
    train->add_option("--mask", mask_path, "selection JSON restricting features");

    auto* predict = app.add_subcommand("predict", "predict with a saved model");
    add_common(predict, predict_args, true, false);
    predict->add_option("--model", model_path, "model JSON")->required();

    auto* pipeline = app.add_subcommand("pipeline", "cross-validated evaluation of the pipeline");
    add_common(pipeline, pipe_args, true, true);
    pipeline->add_option("--mode", pipe_mode, "run one mode: rf_only, smote_rf or smote_ga_rf");
    pipeline->add_option("--folds", pipe_folds, "cross-validation fold count");
    pipeline->add_option("--smote-k", pipe_smote_k, "SMOTE neighbor count override");
    pipeline->add_option("--smote-scope", pipe_scope, "per_fold or global");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForVersion")
            return app.exit(e);
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }

    try {
        if (synth->parsed()) return cmd_synth(synth_args);
        if (preprocess->parsed()) return cmd_preprocess(pre_args);
        if (smote->parsed()) return cmd_smote(smote_args, smote_k);
        if (select->parsed()) return cmd_select(select_args);
        if (train->parsed()) return cmd_train(train_args, mask_path);
        if (predict->parsed()) return cmd_predict(predict_args, model_path);
        if (pipeline->parsed())
            return cmd_pipeline(pipe_args, pipe_mode, pipe_folds, pipe_smote_k, pipe_scope);
    } catch (const CliError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitComputeError;
    }
    return 0;
}
