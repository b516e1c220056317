#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ecoplex/cocluster.hpp"
#include "ecoplex/complexity.hpp"
#include "ecoplex/interpretation.hpp"
#include "ecoplex/matrix.hpp"
#include "ecoplex/simulate.hpp"

// On-disk pipeline artifacts. Every numeric cell goes through the
// 12-significant-digit formatter and every container is iterated in a
// fixed order, so identical inputs produce byte-identical files.
namespace ecoplex::artifacts {

using ojson = nlohmann::ordered_json;

std::filesystem::path ensure_dir(const std::string& dir);
void write_text(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);

// Doubles destined for JSON, rounded to the 12-significant-digit contract.
double json_number(double v);

void write_matrix(const std::filesystem::path& dir, const SpecializationMatrix& m,
                  const PruneReport& report, const std::string& policy);
SpecializationMatrix read_matrix(const std::filesystem::path& dir);
bool matrix_exists(const std::filesystem::path& dir);
bool scores_exist(const std::filesystem::path& dir);

void write_scores(const std::filesystem::path& dir, const SpecializationMatrix& m,
                  const ComplexityScores& scores, double cross_route_residual);

void write_verify(const std::filesystem::path& dir, const std::vector<IdentityCheck>& checks);

void write_reflections(const std::filesystem::path& dir, const SpecializationMatrix& m,
                       const ReflectionsTrace& trace,
                       const std::vector<double>& spearman_by_iteration);

void write_assignment(const std::filesystem::path& dir, const CoClusterAssignment& assignment);
void write_gmm(const std::filesystem::path& dir, const GmmModel& model);
void write_joint_membership(const std::filesystem::path& dir,
                            const CoClusterAssignment& assignment,
                            const JointMembership& joint);
void write_product_sets(const std::filesystem::path& dir, const ProductSets& sets);

// Plot-ready emissions for the five report panels: membership histograms
// (bins aligned so 0.5 is an edge), the sorted-matrix coordinates, and the
// edge-level scatter with per-country mean-PCI / per-product mean-ECI
// overlays.
void write_cocluster_reports(const std::filesystem::path& dir, const SpecializationMatrix& m,
                             const ComplexityScores& scores,
                             const CoClusterAssignment& assignment,
                             const JointMembership& joint);

void write_sweep(const std::filesystem::path& dir, const std::vector<SimulationRecord>& records);
void write_greedy(const std::filesystem::path& dir, const GreedyTrajectory& trajectory);

// Written as config.<command>.json so pipeline stages sharing one output
// directory keep their own effective configs.
void write_config(const std::filesystem::path& dir, const ojson& config);

}  // namespace ecoplex::artifacts
