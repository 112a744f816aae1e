#pragma once

// File-backed datasets and per-image metric tables.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sei {

enum class Split { Train, Test };

std::string to_string(Split split);

struct SampleRecord {
    std::string id;
    std::filesystem::path measurement;
    std::optional<std::filesystem::path> reference;
    std::uint64_t noise_seed = 0;
};

struct Dataset {
    std::vector<SampleRecord> samples;
    Split split = Split::Train;

    bool empty() const { return samples.empty(); }
    std::size_t size() const { return samples.size(); }
    /// True when every sample has a reference.
    bool has_references() const;
};

/// Image files directly inside `dir`, sorted by file name.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

/// Seeded shuffle, first `n_test` to the test split. Within each split the
/// input order is kept. Sample ids are file stems and noise seeds are input
/// indices.
std::pair<Dataset, Dataset> split_dataset(const std::vector<std::filesystem::path>& paths,
                                          std::size_t n_test, std::uint64_t seed);

struct MetricRow {
    std::string id;
    double psnr_y = 0.0;
    double ssim_y = 0.0;
};

/// Mean over rows, with id "mean".
MetricRow summarize(const std::vector<MetricRow>& rows);

/// CSV with header `id,psnr_y,ssim_y`, one line per row, then the summary.
void write_metric_rows(std::ostream& out, const std::vector<MetricRow>& rows);

/// Parses a file written by write_metric_rows (summary included as a row).
std::vector<MetricRow> read_metric_rows(std::istream& in);

/// Fixed-format number used in every CSV the library writes.
std::string format_number(double v);

}  // namespace sei
