#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "pangle/linalg.hpp"

namespace pangle::tools {

/// Supported figure ids, in reproduction order.
const std::vector<std::string>& figure_ids();

/// Parameters of one reproduction run. Empty grids are filled with the figure's
/// defaults by `resolved()`; validate() checks the resolved values.
struct ExperimentConfig {
    std::string id;
    std::vector<double> sigma2;    ///< noise grid (fig8 plots sigma = sqrt of these)
    double p = 6.0;                ///< moderate-regime parameter (fig1c)
    std::size_t trials = 100000;   ///< Monte Carlo trials per empirical grid point
    std::size_t mc_samples = 100000;  ///< draws for the NSC bound integral
    std::vector<Index> m;          ///< feature dimensions (fig4/fig8 use m.front())
    std::uint64_t seed = 1;
    std::string out = ".";
    Index train_per_class = 100;
    Index test_per_class = 10000;

    ExperimentConfig resolved() const;
    void validate() const;
    nlohmann::json to_json() const;
    /// Reads the JSON fields above (all optional except where noted); unknown keys are rejected.
    static ExperimentConfig from_json(const nlohmann::json& j);
};

/// n log-spaced points from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t n);

struct Curve {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> y_stderr;

    void push(double xv, double yv, double se) {
        x.push_back(xv);
        y.push_back(yv);
        y_stderr.push_back(se);
    }
};

struct FigureResult {
    std::string id;
    std::vector<Curve> curves;
    nlohmann::json manifest;

    const Curve& curve(const std::string& name) const;
};

/// Runs one figure. Throws InvalidArgument for an unknown id.
FigureResult run_figure(const ExperimentConfig& config);

/// Writes <dir>/<id>_<curve>.csv (header x_value,y_value,y_stderr) per curve and
/// <dir>/<id>_manifest.json. Each file is written to a temporary name and renamed.
/// Returns the paths written.
std::vector<std::filesystem::path> write_figure(const FigureResult& result, const std::filesystem::path& dir);

/// Writes `text` to `path` through a temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

/// Version and build information recorded in every manifest.
nlohmann::json build_info();

}  // namespace pangle::tools
