#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "commands.hpp"
#include "data_dir.hpp"
#include "sei/dataset.hpp"
#include "sei/error.hpp"

namespace sei::cli {

namespace {

struct Entry {
    std::string method;
    std::string degradation;
    fs::path path;
};

Entry parse_entry(const std::string& text) {
    const auto a = text.find(',');
    const auto b = a == std::string::npos ? a : text.find(',', a + 1);
    if (b == std::string::npos || a == 0 || b == a + 1 || b + 1 == text.size()) {
        throw ValidationError("bad --entry '" + text + "' (expected method,degradation,path)");
    }
    return {text.substr(0, a), text.substr(a + 1, b - a - 1), text.substr(b + 1)};
}

MetricRow mean_row(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    auto rows = read_metric_rows(in);
    if (!rows.empty() && rows.back().id == "mean") return rows.back();
    if (rows.empty()) throw ValidationError(path.string() + ": no metric rows");
    return summarize(rows);
}

std::string fixed(double v, int digits) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

template <class T>
std::size_t index_of(std::vector<T>& order, const T& value) {
    for (std::size_t i = 0; i < order.size(); ++i)
        if (order[i] == value) return i;
    order.push_back(value);
    return order.size() - 1;
}

}  // namespace

int cmd_report(const ReportOptions& opts) {
    if (opts.entries.empty()) throw ValidationError("report needs at least one --entry");
    std::vector<std::string> methods, degradations;
    std::map<std::pair<std::size_t, std::size_t>, MetricRow> cells;
    for (const auto& text : opts.entries) {
        const auto e = parse_entry(text);
        const auto key = std::make_pair(index_of(methods, e.method), index_of(degradations, e.degradation));
        if (cells.count(key)) {
            throw ValidationError("duplicate entry for method '" + e.method + "' and degradation '" + e.degradation + "'");
        }
        cells[key] = mean_row(e.path);
    }
    for (std::size_t m = 0; m < methods.size(); ++m)
        for (std::size_t d = 0; d < degradations.size(); ++d)
            if (!cells.count({m, d})) {
                throw ValidationError("inconsistent columns: method '" + methods[m] + "' has no result for '" +
                                      degradations[d] + "'");
            }

    // Bold the best displayed value per column; ties are all bold.
    auto shown = [&](std::size_t m, std::size_t d, bool is_psnr) {
        const auto& c = cells.at({m, d});
        return is_psnr ? fixed(c.psnr_y, 2) : fixed(c.ssim_y, 4);
    };
    std::ostringstream md;
    md << "| Method |";
    for (const auto& d : degradations) md << ' ' << d << " PSNR | " << d << " SSIM |";
    md << "\n|---|";
    for (std::size_t d = 0; d < degradations.size(); ++d) md << "---:|---:|";
    md << '\n';
    for (std::size_t m = 0; m < methods.size(); ++m) {
        md << "| " << methods[m] << " |";
        for (std::size_t d = 0; d < degradations.size(); ++d) {
            for (bool is_psnr : {true, false}) {
                double best = -INFINITY;
                for (std::size_t k = 0; k < methods.size(); ++k) best = std::max(best, std::stod(shown(k, d, is_psnr)));
                const auto text = shown(m, d, is_psnr);
                md << ' ' << (std::stod(text) == best ? "**" + text + "**" : text) << " |";
            }
        }
        md << '\n';
    }
    if (opts.output) {
        write_text_file(*opts.output, md.str());
    } else {
        std::cout << md.str();
    }
    return 0;
}

}  // namespace sei::cli
