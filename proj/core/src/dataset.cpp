#include "sei/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "sei/error.hpp"
#include "sei/image_io.hpp"
#include "sei/rng.hpp"

namespace sei {

std::string to_string(Split split) { return split == Split::Train ? "train" : "test"; }

bool Dataset::has_references() const {
    return !samples.empty() &&
           std::all_of(samples.begin(), samples.end(), [](const auto& s) { return s.reference.has_value(); });
}

std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw IoError(dir.string() + " is not a directory");
    std::vector<std::filesystem::path> out;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && is_image_path(entry.path())) out.push_back(entry.path());
    }
    std::sort(out.begin(), out.end(),
              [](const auto& a, const auto& b) { return a.filename() < b.filename(); });
    return out;
}

std::pair<Dataset, Dataset> split_dataset(const std::vector<std::filesystem::path>& paths,
                                          std::size_t n_test, std::uint64_t seed) {
    if (n_test >= paths.size()) {
        throw ValidationError("split_dataset: n_test=" + std::to_string(n_test) +
                              " must be smaller than the " + std::to_string(paths.size()) +
                              " available samples");
    }
    std::vector<std::size_t> order(paths.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed, streams::kSplit);
    for (std::size_t i = order.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
        std::swap(order[i - 1], order[j]);
    }
    std::vector<std::size_t> test(order.begin(), order.begin() + static_cast<long>(n_test));
    std::vector<std::size_t> train(order.begin() + static_cast<long>(n_test), order.end());
    std::sort(test.begin(), test.end());
    std::sort(train.begin(), train.end());
    auto build = [&](const std::vector<std::size_t>& idx, Split split) {
        Dataset ds;
        ds.split = split;
        for (auto i : idx) ds.samples.push_back({paths[i].stem().string(), paths[i], std::nullopt, i});
        return ds;
    };
    return {build(train, Split::Train), build(test, Split::Test)};
}

MetricRow summarize(const std::vector<MetricRow>& rows) {
    MetricRow mean{"mean", 0.0, 0.0};
    if (rows.empty()) return mean;
    for (const auto& r : rows) {
        mean.psnr_y += r.psnr_y;
        mean.ssim_y += r.ssim_y;
    }
    mean.psnr_y /= static_cast<double>(rows.size());
    mean.ssim_y /= static_cast<double>(rows.size());
    return mean;
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

void write_metric_rows(std::ostream& out, const std::vector<MetricRow>& rows) {
    out << "id,psnr_y,ssim_y\n";
    for (const auto& r : rows) {
        out << r.id << ',' << format_number(r.psnr_y) << ',' << format_number(r.ssim_y) << '\n';
    }
    const auto mean = summarize(rows);
    out << mean.id << ',' << format_number(mean.psnr_y) << ',' << format_number(mean.ssim_y) << '\n';
}

std::vector<MetricRow> read_metric_rows(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != "id,psnr_y,ssim_y") {
        throw ValidationError("metrics CSV: expected header 'id,psnr_y,ssim_y'");
    }
    std::vector<MetricRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string id, p, s;
        if (!std::getline(ls, id, ',') || !std::getline(ls, p, ',') || !std::getline(ls, s)) {
            throw ValidationError("metrics CSV: malformed line '" + line + "'");
        }
        try {
            rows.push_back({id, std::stod(p), std::stod(s)});
        } catch (const std::exception&) {
            throw ValidationError("metrics CSV: non-numeric value in '" + line + "'");
        }
    }
    return rows;
}

}  // namespace sei
