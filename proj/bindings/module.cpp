#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ledgerprint/attack.hpp"
#include "ledgerprint/classifier.hpp"
#include "ledgerprint/errors.hpp"
#include "ledgerprint/features.hpp"
#include "ledgerprint/harness.hpp"
#include "ledgerprint/ledger.hpp"
#include "ledgerprint/obfuscate.hpp"
#include "ledgerprint/trace.hpp"

namespace py = pybind11;
using namespace ledgerprint;

PYBIND11_MODULE(_core, m) {
    m.doc() = "Device-classification attacks on IoT transaction ledgers and "
              "the timestamp obfuscation defenses against them";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

    // --- trace ---
    py::class_<PacketRecord>(m, "PacketRecord")
        .def(py::init<>())
        .def_readwrite("timestamp", &PacketRecord::timestamp)
        .def_readwrite("device_id", &PacketRecord::device_id)
        .def_readwrite("device_type", &PacketRecord::device_type)
        .def_readwrite("payload_size", &PacketRecord::payload_size)
        .def("__eq__", [](const PacketRecord& a, const PacketRecord& b) { return a == b; });

    py::class_<DeviceProfile>(m, "DeviceProfile")
        .def(py::init<>())
        .def_readwrite("device_type", &DeviceProfile::device_type)
        .def_readwrite("gap_cycle", &DeviceProfile::gap_cycle)
        .def_readwrite("jitter_fraction", &DeviceProfile::jitter_fraction);

    py::class_<TraceSet>(m, "TraceSet")
        .def(py::init<>())
        .def_readwrite("records", &TraceSet::records)
        .def_readwrite("duration", &TraceSet::duration)
        .def_readwrite("epoch", &TraceSet::epoch)
        .def("__len__", [](const TraceSet& t) { return t.records.size(); });

    m.def("parse_trace", &parse_trace, py::arg("csv_text"));
    m.def("serialize_trace", &serialize_trace, py::arg("trace"));
    m.def("builtin_profiles", &builtin_profiles);
    m.def("select_profiles", &select_profiles, py::arg("device_types"));
    m.def("synth_trace", &synth_trace, py::arg("profiles"), py::arg("device_counts"),
          py::arg("duration"), py::arg("seed"));
    m.def("balance_trace", &balance_trace, py::arg("trace"), py::arg("max_per_device"),
          py::arg("run_length"), py::arg("seed"));
    m.def("device_ids", &device_ids, py::arg("trace"));
    m.def("device_types", &device_types, py::arg("trace"));

    // --- obfuscate ---
    py::class_<ObfuscationConfig>(m, "ObfuscationConfig")
        .def(py::init<>())
        .def(py::init([](double max_delay, int k, int n, uint64_t seed) {
                 return ObfuscationConfig{max_delay, k, n, seed};
             }),
             py::arg("max_delay") = 0.0, py::arg("devices_per_ledger") = 1,
             py::arg("packets_per_transaction") = 1, py::arg("seed") = 0)
        .def_readwrite("max_delay", &ObfuscationConfig::max_delay)
        .def_readwrite("devices_per_ledger", &ObfuscationConfig::devices_per_ledger)
        .def_readwrite("packets_per_transaction", &ObfuscationConfig::packets_per_transaction)
        .def_readwrite("seed", &ObfuscationConfig::seed);

    py::class_<ObfuscationResult>(m, "ObfuscationResult")
        .def_readonly("trace", &ObfuscationResult::trace)
        .def_readonly("assignment", &ObfuscationResult::assignment);

    m.def("delay_transform", &delay_transform, py::arg("trace"), py::arg("max_delay"),
          py::arg("seed"));
    m.def("assign_multi_device", &assign_multi_device, py::arg("device_ids"), py::arg("k"),
          py::arg("seed"));
    m.def("consolidate_packets", &consolidate_packets, py::arg("trace"), py::arg("n"));
    m.def("apply_obfuscation", &apply_obfuscation, py::arg("config"), py::arg("trace"),
          py::arg("devices"));
    m.def("parse_obfuscation_config", &parse_obfuscation_config, py::arg("text"));

    // --- ledger ---
    py::class_<Transaction>(m, "Transaction")
        .def(py::init<>())
        .def_readwrite("t_id", &Transaction::t_id)
        .def_readwrite("p_t_id", &Transaction::p_t_id)
        .def_readwrite("timestamp", &Transaction::timestamp)
        .def_readwrite("output", &Transaction::output)
        .def_readwrite("pk", &Transaction::pk)
        .def_readwrite("sign", &Transaction::sign)
        .def_readwrite("true_device_id", &Transaction::true_device_id)
        .def_readwrite("true_device_type", &Transaction::true_device_type);

    py::class_<LedgerChain>(m, "LedgerChain")
        .def(py::init<>())
        .def_readwrite("ledger_id", &LedgerChain::ledger_id)
        .def_readwrite("transactions", &LedgerChain::transactions)
        .def_readwrite("member_devices", &LedgerChain::member_devices)
        .def("__len__", [](const LedgerChain& c) { return c.transactions.size(); });

    py::class_<Block>(m, "Block")
        .def_readonly("block_id", &Block::block_id)
        .def_readonly("prev_block_id", &Block::prev_block_id)
        .def_readonly("transactions", &Block::transactions);

    m.def("genesis_marker", &genesis_marker);
    m.def(
        "populate",
        [](const TraceSet& trace, const std::map<std::string, std::string>& assignment,
           uint64_t key_seed) { return populate(trace, assignment, key_seed); },
        py::arg("trace"), py::arg("assignment"), py::arg("key_seed"));
    m.def("verify_chain", &verify_chain, py::arg("chain"));
    m.def("form_blocks", &form_blocks, py::arg("chains"), py::arg("blocksize"));
    m.def("verify_blocks", &verify_blocks, py::arg("blocks"));
    m.def("export_ledger", &export_ledger, py::arg("chains"));
    m.def("import_ledger", &import_ledger, py::arg("jsonl"));
    m.def("export_labels", &export_labels, py::arg("chains"));
    m.def("parse_labels", &parse_labels, py::arg("csv_text"));
    m.def("labels_from_chains", &labels_from_chains, py::arg("chains"));

    // --- features ---
    py::class_<FeatureConfig>(m, "FeatureConfig")
        .def(py::init<>())
        .def_readwrite("window", &FeatureConfig::window)
        .def_readwrite("log_scale", &FeatureConfig::log_scale)
        .def_readwrite("pad_value", &FeatureConfig::pad_value);

    py::class_<FeatureVector>(m, "FeatureVector")
        .def(py::init<>())
        .def_readwrite("values", &FeatureVector::values)
        .def_readwrite("label", &FeatureVector::label)
        .def_readwrite("ledger_id", &FeatureVector::ledger_id)
        .def_readwrite("t_id", &FeatureVector::t_id);

    py::class_<LabeledDataset>(m, "LabeledDataset")
        .def(py::init<>())
        .def_readwrite("examples", &LabeledDataset::examples)
        .def_readwrite("label_vocabulary", &LabeledDataset::label_vocabulary)
        .def("__len__", [](const LabeledDataset& d) { return d.examples.size(); });

    m.def("dataset_from_examples", &dataset_from_examples, py::arg("examples"));
    m.def("extract", &extract, py::arg("chains"), py::arg("labels"), py::arg("config"));
    m.def("split_kfold", &split_kfold, py::arg("dataset"), py::arg("k"), py::arg("seed"));
    m.def("serialize_dataset", &serialize_dataset, py::arg("dataset"));
    m.def("parse_dataset", &parse_dataset, py::arg("csv_text"));

    // --- classifier ---
    py::class_<TrainConfig>(m, "TrainConfig")
        .def(py::init<>())
        .def_readwrite("max_depth", &TrainConfig::max_depth)
        .def_readwrite("min_samples_split", &TrainConfig::min_samples_split)
        .def_readwrite("seed", &TrainConfig::seed);

    py::class_<DecisionTree>(m, "DecisionTree")
        .def_readonly("n_features", &DecisionTree::n_features)
        .def_readonly("labels", &DecisionTree::labels)
        .def("__len__", [](const DecisionTree& t) { return t.nodes.size(); });

    py::class_<SplitCandidate>(m, "SplitCandidate")
        .def_readonly("feature", &SplitCandidate::feature)
        .def_readonly("threshold", &SplitCandidate::threshold);

    py::class_<ClassificationReport>(m, "ClassificationReport")
        .def_readonly("accuracy", &ClassificationReport::accuracy)
        .def_readonly("total", &ClassificationReport::total)
        .def_readonly("confusion", &ClassificationReport::confusion)
        .def_readonly("per_class_recall", &ClassificationReport::per_class_recall);

    m.def("gini", &gini, py::arg("labels"));
    m.def("best_split", &best_split, py::arg("dataset"));
    m.def("train", &train, py::arg("dataset"), py::arg("config") = TrainConfig{});
    m.def("predict", &predict, py::arg("tree"), py::arg("values"));
    m.def("evaluate", &evaluate, py::arg("tree"), py::arg("dataset"));
    m.def("tree_to_json", &tree_to_json, py::arg("tree"));
    m.def("tree_from_json", &tree_from_json, py::arg("json_text"));

    // --- attack ---
    py::enum_<ScenarioKind>(m, "ScenarioKind")
        .value("Informed", ScenarioKind::Informed)
        .value("Blind", ScenarioKind::Blind);

    py::class_<ScenarioReport>(m, "ScenarioReport")
        .def_readonly("accuracies", &ScenarioReport::accuracies)
        .def_readonly("mean_accuracy", &ScenarioReport::mean_accuracy)
        .def_readonly("max_accuracy", &ScenarioReport::max_accuracy)
        .def_readonly("variance", &ScenarioReport::variance)
        .def_readonly("per_class_recall", &ScenarioReport::per_class_recall);

    m.def("run_informed", &run_informed, py::arg("dataset"), py::arg("folds"),
          py::arg("train_config"), py::arg("seed"));
    m.def("run_blind", &run_blind, py::arg("lab_dataset"), py::arg("home_dataset"),
          py::arg("train_config"));

    // --- harness ---
    py::class_<ExperimentSpec>(m, "ExperimentSpec")
        .def(py::init<>())
        .def_readwrite("trace_csv", &ExperimentSpec::trace_csv)
        .def_readwrite("duration", &ExperimentSpec::duration)
        .def_readwrite("jitter", &ExperimentSpec::jitter)
        .def_readwrite("count_per_type", &ExperimentSpec::count_per_type)
        .def_readwrite("device_types", &ExperimentSpec::device_types)
        .def_readwrite("max_packets_per_device", &ExperimentSpec::max_packets_per_device)
        .def_readwrite("balance_run_length", &ExperimentSpec::balance_run_length)
        .def_readwrite("delays", &ExperimentSpec::delays)
        .def_readwrite("devices_per_ledger", &ExperimentSpec::devices_per_ledger)
        .def_readwrite("packets_per_transaction", &ExperimentSpec::packets_per_transaction)
        .def_readwrite("scenarios", &ExperimentSpec::scenarios)
        .def_readwrite("trials", &ExperimentSpec::trials)
        .def_readwrite("folds", &ExperimentSpec::folds)
        .def_readwrite("blind_lab_fraction_min", &ExperimentSpec::blind_lab_fraction_min)
        .def_readwrite("blind_lab_fraction_max", &ExperimentSpec::blind_lab_fraction_max)
        .def_readwrite("lab_duration", &ExperimentSpec::lab_duration)
        .def_readwrite("days", &ExperimentSpec::days)
        .def_readwrite("features", &ExperimentSpec::features)
        .def_readwrite("train", &ExperimentSpec::train)
        .def_readwrite("seed", &ExperimentSpec::seed)
        .def_readwrite("out_dir", &ExperimentSpec::out_dir);

    py::class_<TrialRow>(m, "TrialRow")
        .def_readonly("grid_index", &TrialRow::grid_index)
        .def_readonly("max_delay", &TrialRow::max_delay)
        .def_readonly("devices_per_ledger", &TrialRow::devices_per_ledger)
        .def_readonly("packets_per_transaction", &TrialRow::packets_per_transaction)
        .def_readonly("scenario", &TrialRow::scenario)
        .def_readonly("trial", &TrialRow::trial)
        .def_readonly("accuracy", &TrialRow::accuracy);

    py::class_<PointSummary>(m, "PointSummary")
        .def_readonly("max_delay", &PointSummary::max_delay)
        .def_readonly("devices_per_ledger", &PointSummary::devices_per_ledger)
        .def_readonly("packets_per_transaction", &PointSummary::packets_per_transaction)
        .def_readonly("scenario", &PointSummary::scenario)
        .def_readonly("trials", &PointSummary::trials)
        .def_readonly("mean_accuracy", &PointSummary::mean_accuracy)
        .def_readonly("max_accuracy", &PointSummary::max_accuracy)
        .def_readonly("variance", &PointSummary::variance);

    py::class_<SweepResult>(m, "SweepResult")
        .def_readonly("rows", &SweepResult::rows)
        .def_readonly("summaries", &SweepResult::summaries);

    m.def("parse_experiment_spec", &parse_experiment_spec, py::arg("toml_text"));
    m.def("build_home_trace", &build_home_trace, py::arg("spec"));
    m.def(
        "run_sweep",
        [](const ExperimentSpec& spec, int jobs, bool resume) {
            SweepOptions options;
            options.jobs = jobs;
            options.resume = resume;
            return run_sweep(spec, options);
        },
        py::arg("spec"), py::arg("jobs") = 1, py::arg("resume") = false);
    m.def("results_csv", &results_csv, py::arg("rows"));
    m.def("summary_csv", &summary_csv, py::arg("summaries"));
}
