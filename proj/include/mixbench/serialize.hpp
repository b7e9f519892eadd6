#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "mixbench/bounds.hpp"
#include "mixbench/estimators.hpp"
#include "mixbench/experiment.hpp"
#include "mixbench/packing.hpp"

// JSON forms of the public result types. Non-finite doubles are written as
// null; every reader below accepts what the matching writer produces.

namespace nlohmann {

template <>
struct adl_serializer<mixbench::Mixture> {
  static void to_json(json& j, const mixbench::Mixture& theta);
  static mixbench::Mixture from_json(const json& j);
};

template <>
struct adl_serializer<mixbench::Classifier> {
  static void to_json(json& j, const mixbench::Classifier& clf);
  static mixbench::Classifier from_json(const json& j);
};

}  // namespace nlohmann

namespace mixbench {

void to_json(nlohmann::json& j, const LossEstimate& e);
void from_json(const nlohmann::json& j, LossEstimate& e);

void to_json(nlohmann::json& j, const ScreeningResult<double>& r);
void from_json(const nlohmann::json& j, ScreeningResult<double>& r);

void to_json(nlohmann::json& j, const SupportTruth& t);
void from_json(const nlohmann::json& j, SupportTruth& t);
void to_json(nlohmann::json& j, const RecoveryReport& r);
void from_json(const nlohmann::json& j, RecoveryReport& r);

void to_json(nlohmann::json& j, const DavisKahanResult& r);

void to_json(nlohmann::json& j, const BoundReport& r);
void from_json(const nlohmann::json& j, BoundReport& r);

void to_json(nlohmann::json& j, const FanoReport& r);
void to_json(nlohmann::json& j, const TriangleReport& r);

void to_json(nlohmann::json& j, const BinaryCode& c);
void from_json(const nlohmann::json& j, BinaryCode& c);
void to_json(nlohmann::json& j, const PackingFamily& f);
void from_json(const nlohmann::json& j, PackingFamily& f);

void to_json(nlohmann::json& j, const SweepResult& r);
void from_json(const nlohmann::json& j, SweepResult& r);

/// Dataset as CSV (columns x0..x{d-1}, plus `label` when labels are
/// present) and a JSON sidecar {n, d, seed, has_labels, theta}.
void write_dataset_csv(const Dataset<double>& data, std::ostream& out);
nlohmann::json dataset_header(const Dataset<double>& data);
/// Reads the CSV back; `header`, when given, restores seed and theta.
Dataset<double> read_dataset_csv(std::istream& in, const nlohmann::json* header = nullptr);

void write_json_file(const nlohmann::json& j, const std::string& path);
nlohmann::json read_json_file(const std::string& path);

}  // namespace mixbench
