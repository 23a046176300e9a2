#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sairod/policy.hpp"
#include "sairod/state_space.hpp"

namespace sairod {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public IoError {
public:
    ParseError(const std::filesystem::path& file, std::size_t line, const std::string& what);
};

// Named state sets exported alongside a model.
struct LabelSet {
    std::vector<std::string> names;
    std::vector<std::vector<StateIndex>> members;  // sorted indices per name

    void add(std::string name, std::vector<StateIndex> indices);
};

// The label predicates shipped by default: "init" (the given initial states),
// "hospital_full" (O = C), "deaths_ge_<frac>" (D >= frac*N) and
// "all_absorbed" (A = I = O = Q = 0).
LabelSet default_labels(const StateSpace& space, std::span<const StateIndex> initial,
                        double deaths_fraction = 0.2);

// Explicit-state layout, written as <base>.sta / .tra / .lab / .json:
//   .sta   one state per line, index order, space-separated integers
//          (8 columns for the full model, 6 for the simplified one)
//   .tra   "src dst prob" per line for a DTMC, "src actionIndex dst prob"
//          for an MDP table; probabilities with 17 significant digits
//   .lab   label names, then "stateIndex: labelIndex ..." per labelled state
//   .json  header: N, C, parameter vector, action list, model kind
// With prism_headers = true, .sta/.tra/.lab gain the header lines the PRISM
// explicit importer expects (variable tuple, size counts).
struct ExportOptions {
    bool prism_headers = false;
};

void export_dtmc(const Dtmc& dtmc, const LabelSet& labels,
                 const std::filesystem::path& base, const ExportOptions& options = {});

void export_mdp(const BuiltModel& model, const LabelSet& labels,
                const std::filesystem::path& base, const ExportOptions& options = {});

struct ImportedDtmc {
    Dtmc dtmc;
    LabelSet labels;
};
struct ImportedMdp {
    BuiltModel model;
    LabelSet labels;
};

// Inverse of export_*; validates row stochasticity and rejects malformed
// input with line-accurate ParseErrors.
ImportedDtmc import_dtmc(const std::filesystem::path& base);
ImportedMdp import_mdp(const std::filesystem::path& base);

// Writes a file atomically (temp file + rename).
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

// Shortest-round-trip-style probability formatting (17 significant digits,
// trailing zeros trimmed by %g).
std::string format_probability(double p);

}  // namespace sairod
