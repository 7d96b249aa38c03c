#include "rbmkit/dataset.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rbmkit {

namespace {

std::vector<long> parse_int_row(const std::string& line, std::size_t line_no) {
    std::vector<long> values;
    values.reserve(kNumPixels + 1);
    const char* p = line.data();
    const char* end = line.data() + line.size();
    while (p < end) {
        while (p < end && (*p == ' ' || *p == '\t')) ++p;
        long v = 0;
        auto [next, ec] = std::from_chars(p, end, v);
        if (ec != std::errc()) {
            throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                                     ": expected an integer near '" + std::string(p, std::min<std::size_t>(8, end - p)) + "'");
        }
        values.push_back(v);
        p = next;
        while (p < end && (*p == ' ' || *p == '\t' || *p == '\r')) ++p;
        if (p < end) {
            if (*p != ',') {
                throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                                         ": expected ',' near '" + std::string(p, 1) + "'");
            }
            ++p;
        }
    }
    return values;
}

} // namespace

Dataset load_digits(const std::string& path, double threshold, SplitTag tag) {
    if (threshold <= 0.0 || threshold >= 1.0)
        throw std::invalid_argument("binarize threshold must be in (0,1)");
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path);

    struct RawRow {
        std::vector<long> intensities;
        int label;
    };
    std::vector<RawRow> rows;
    long max_intensity = 0;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        std::vector<long> values = parse_int_row(line, line_no);
        if (values.size() != kNumPixels + 1) {
            throw std::runtime_error("parse error at line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(kNumPixels + 1) + " comma-separated integers, got " +
                                     std::to_string(values.size()));
        }
        long label = values.back();
        if (label < 0 || label >= kNumClasses) {
            throw std::runtime_error("parse error at line " + std::to_string(line_no) + ": label " +
                                     std::to_string(label) + " out of range 0..9");
        }
        for (int j = 0; j < kNumPixels; ++j) {
            if (values[static_cast<std::size_t>(j)] < 0)
                throw std::runtime_error("parse error at line " + std::to_string(line_no) +
                                         ": negative pixel intensity");
            max_intensity = std::max(max_intensity, values[static_cast<std::size_t>(j)]);
        }
        values.pop_back();
        rows.push_back({std::move(values), static_cast<int>(label)});
    }
    if (rows.empty()) throw std::runtime_error("empty dataset: " + path);

    Dataset d;
    d.split_tag = tag;
    d.patterns.reserve(rows.size());
    for (const RawRow& r : rows) {
        LabeledPattern p;
        p.label = r.label;
        p.pixels.resize(kNumPixels);
        for (int j = 0; j < kNumPixels; ++j) {
            double rel = max_intensity > 0
                             ? static_cast<double>(r.intensities[static_cast<std::size_t>(j)]) /
                                   static_cast<double>(max_intensity)
                             : 0.0;
            p.pixels[static_cast<std::size_t>(j)] = rel >= threshold ? 1 : 0;
        }
        d.patterns.push_back(std::move(p));
    }
    return d;
}

BinaryVector encode_visible(const LabeledPattern& p) {
    if (static_cast<int>(p.pixels.size()) != kNumPixels)
        throw std::invalid_argument("pattern must have 64 pixels");
    if (p.label < 0 || p.label >= kNumClasses)
        throw std::invalid_argument("label out of range 0..9");
    BinaryVector v(kNumVisible, 0);
    for (int j = 0; j < kNumPixels; ++j) v[static_cast<std::size_t>(j)] = p.pixels[static_cast<std::size_t>(j)] ? 1 : 0;
    v[static_cast<std::size_t>(kNumPixels + p.label)] = 1;
    return v;
}

int decode_label(const BinaryVector& visible) {
    if (static_cast<int>(visible.size()) != kNumVisible) return -1;
    int label = -1;
    for (int c = 0; c < kNumClasses; ++c) {
        if (visible[static_cast<std::size_t>(kNumPixels + c)]) {
            if (label >= 0) return -1;
            label = c;
        }
    }
    return label;
}

Dataset filter_classes(const Dataset& d, const std::set<int>& classes) {
    if (classes.empty()) throw std::invalid_argument("filter_classes: class set must be nonempty");
    for (int c : classes)
        if (c < 0 || c >= kNumClasses) throw std::invalid_argument("filter_classes: class out of range 0..9");
    Dataset out;
    out.split_tag = d.split_tag;
    for (const LabeledPattern& p : d.patterns)
        if (classes.count(p.label)) out.patterns.push_back(p);
    if (out.patterns.empty()) {
        std::ostringstream msg;
        msg << "empty selection: no patterns with label in {";
        bool first = true;
        for (int c : classes) {
            if (!first) msg << ",";
            msg << c;
            first = false;
        }
        msg << "}";
        throw std::runtime_error(msg.str());
    }
    return out;
}

void write_digits_csv(const std::string& path, const Dataset& d, int max_intensity) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    for (const LabeledPattern& p : d.patterns) {
        for (int j = 0; j < kNumPixels; ++j)
            out << (p.pixels[static_cast<std::size_t>(j)] ? max_intensity : 0) << ",";
        out << p.label << "\n";
    }
}

} // namespace rbmkit
