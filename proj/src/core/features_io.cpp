#include "core/features_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "core/errors.hpp"

namespace evs {

void FeatureSet::append(const FeatureVector& fv) {
    if (labels.empty()) {
        kind = fv.kind;
        dim = fv.values.size();
    } else {
        if (fv.kind != kind) throw InvalidInput("feature set: mixed kinds");
        if (fv.values.size() != dim) throw InvalidInput("feature set: mixed dimensions");
    }
    labels.push_back(fv.label);
    values.insert(values.end(), fv.values.begin(), fv.values.end());
}

void write_features(const std::string& path, const FeatureSet& set) {
    const std::string tmp = path + ".tmp";
    std::FILE* f = std::fopen(tmp.c_str(), "wb");
    if (!f) throw IoError("cannot open for writing: " + tmp);

    std::fprintf(f, "label,kind");
    for (std::size_t i = 1; i <= set.dim; ++i) std::fprintf(f, ",f%zu", i);
    std::fprintf(f, "\n");
    for (std::size_t r = 0; r < set.size(); ++r) {
        std::fprintf(f, "%" PRIu16 ",%s", set.labels[r], feature_kind_name(set.kind));
        const double* row = set.row(r);
        for (std::size_t c = 0; c < set.dim; ++c) std::fprintf(f, ",%.12g", row[c]);
        std::fprintf(f, "\n");
    }
    if (std::fclose(f) != 0) throw IoError("close failed on " + tmp);
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("rename " + tmp + " -> " + path + ": " + ec.message());
}

FeatureSet read_features(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open feature file: " + path);

    FeatureSet set;
    std::string line;
    std::size_t line_no = 0;
    std::size_t line_offset = 0;  // byte offset of the current line
    std::size_t next_offset = 0;
    std::size_t expected_cols = 0;

    while (std::getline(in, line)) {
        ++line_no;
        line_offset = next_offset;
        next_offset += line.size() + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        std::vector<std::string> cells;
        std::size_t start = 0;
        while (true) {
            const std::size_t pos = line.find(',', start);
            if (pos == std::string::npos) {
                cells.push_back(line.substr(start));
                break;
            }
            cells.push_back(line.substr(start, pos - start));
            start = pos + 1;
        }

        if (line_no == 1) {
            if (cells.size() < 3 || cells[0] != "label" || cells[1] != "kind")
                throw ParseError(path + ": line " + std::to_string(line_no) + ": expected header 'label,kind,f1..fK'", line_offset);
            expected_cols = cells.size();
            set.dim = expected_cols - 2;
            continue;
        }
        if (cells.size() != expected_cols)
            throw ParseError(path + ": line " + std::to_string(line_no) + " has " +
                                 std::to_string(cells.size()) + " columns, expected " +
                                 std::to_string(expected_cols),
                             line_offset);

        char* end = nullptr;
        const long lab = std::strtol(cells[0].c_str(), &end, 10);
        if (end == cells[0].c_str() || *end != '\0' || lab < 0 || lab > 0xffff)
            throw ParseError(path + ": line " + std::to_string(line_no) + ": bad label '" + cells[0] + "'",
                             line_offset);

        const FeatureKind kind = feature_kind_from_name(cells[1]);
        if (set.labels.empty()) {
            set.kind = kind;
        } else if (kind != set.kind) {
            throw ParseError(path + ": line " + std::to_string(line_no) + ": mixed feature kinds",
                             line_offset);
        }

        set.labels.push_back(static_cast<std::uint16_t>(lab));
        for (std::size_t c = 2; c < cells.size(); ++c) {
            end = nullptr;
            const double v = std::strtod(cells[c].c_str(), &end);
            if (end == cells[c].c_str() || *end != '\0')
                throw ParseError(path + ": line " + std::to_string(line_no) + ": bad number '" + cells[c] + "'",
                                 line_offset);
            set.values.push_back(v);
        }
    }
    if (set.labels.empty()) throw ParseError(path + ": no feature rows", next_offset);
    return set;
}

}  // namespace evs
