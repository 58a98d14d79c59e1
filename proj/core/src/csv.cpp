#include "aupipe/csv.hpp"

#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace aupipe {

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!(end == text.size() && line.empty())) lines.push_back(line);
        if (end == text.size()) break;
        start = end + 1;
    }
    return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t end = line.find(',', start);
        if (end == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, end - start));
        start = end + 1;
    }
    return fields;
}

std::int64_t parse_frame(std::string_view field, std::size_t row) {
    std::int64_t value = 0;
    if (field.empty())
        throw ValueError("row " + std::to_string(row) + ": empty frame index");
    for (char c : field) {
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw ValueError("row " + std::to_string(row) + ": frame index '" +
                             std::string(field) + "' is not a non-negative integer");
        value = value * 10 + (c - '0');
    }
    return value;
}

AuLabel parse_label_cell(std::string_view field, std::size_t row, int au) {
    if (field == "0") return AuLabel::Negative;
    if (field == "1") return AuLabel::Positive;
    if (field == "-1") return AuLabel::Invalid;
    throw ValueError("row " + std::to_string(row) + ": cell '" + std::string(field) + "' in " +
                     kAuNames[static_cast<std::size_t>(au)] +
                     " column must be one of {0, 1, -1}");
}

double parse_float(std::string_view field, std::size_t row, const std::string& col) {
    std::string buf(field);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(buf.c_str(), &end);
    if (end == buf.c_str() || *end != '\0')
        throw ValueError("row " + std::to_string(row) + ": cell '" + buf + "' in column " + col +
                         " is not a number");
    return v;
}

void check_label_header(const std::vector<std::string_view>& fields) {
    const std::vector<std::string> expected = [] {
        std::vector<std::string> v{"video_id", "frame"};
        for (auto* name : kAuNames) v.emplace_back(name);
        return v;
    }();
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i >= fields.size())
            throw FormatError("malformed header: missing column '" + expected[i] + "'");
        if (fields[i] != expected[i])
            throw FormatError("malformed header: expected column '" + expected[i] + "', got '" +
                              std::string(fields[i]) + "'");
    }
}

void check_no_reserved_chars(const std::string& video_id) {
    if (video_id.find(',') != std::string::npos || video_id.find('\n') != std::string::npos ||
        video_id.find('\r') != std::string::npos)
        throw ValueError("video_id '" + video_id + "' contains a CSV delimiter");
}

LabelledDataset parse_rows(std::string_view csv_text, bool with_features) {
    auto lines = split_lines(csv_text);
    if (lines.empty()) throw FormatError("empty file: header row missing");
    auto header = split_fields(lines[0]);
    check_label_header(header);

    std::size_t feature_dim = 0;
    if (with_features) {
        feature_dim = header.size() - 2 - kNumAus;
        for (std::size_t i = 0; i < feature_dim; ++i) {
            const std::string expected = "f" + std::to_string(i);
            if (header[2 + kNumAus + i] != expected)
                throw FormatError("malformed header: expected column '" + expected + "', got '" +
                                  std::string(header[2 + kNumAus + i]) + "'");
        }
    } else if (header.size() != 2 + kNumAus) {
        throw FormatError("malformed header: unexpected extra column '" +
                          std::string(header[2 + kNumAus]) + "'");
    }

    std::vector<Sample> samples;
    samples.reserve(lines.size() - 1);
    for (std::size_t row = 1; row < lines.size(); ++row) {
        auto fields = split_fields(lines[row]);
        const std::size_t expected_fields = 2 + kNumAus + feature_dim;
        if (fields.size() != expected_fields)
            throw FormatError("row " + std::to_string(row) + ": expected " +
                              std::to_string(expected_fields) + " fields, got " +
                              std::to_string(fields.size()));
        Sample s;
        s.video_id = std::string(fields[0]);
        s.frame_idx = parse_frame(fields[1], row);
        for (int k = 0; k < kNumAus; ++k)
            s.labels[k] = parse_label_cell(fields[2 + static_cast<std::size_t>(k)], row, k);
        s.clean_labels = s.labels;
        s.features.reserve(feature_dim);
        for (std::size_t i = 0; i < feature_dim; ++i)
            s.features.push_back(parse_float(fields[2 + kNumAus + i], row, "f" + std::to_string(i)));
        samples.push_back(std::move(s));
    }
    return LabelledDataset::build(std::move(samples));
}

void append_key(std::string& out, const Sample& s) {
    out += s.video_id;
    out += ',';
    out += std::to_string(s.frame_idx);
}

void append_labels(std::string& out, const AuLabelVector& labels) {
    for (int k = 0; k < kNumAus; ++k) {
        out += ',';
        switch (labels[k]) {
            case AuLabel::Negative: out += '0'; break;
            case AuLabel::Positive: out += '1'; break;
            case AuLabel::Invalid: out += "-1"; break;
        }
    }
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    std::string s(buf);
    // Keep float columns visually float-typed.
    if (s.find_first_of(".eEnN") == std::string::npos) s += ".0";
    return s;
}

std::string label_csv_header() {
    std::string h = "video_id,frame";
    for (auto* name : kAuNames) {
        h += ',';
        h += name;
    }
    return h;
}

std::string prediction_csv_header() {
    std::string h = "video_id,frame";
    for (auto* name : kAuNames) {
        h += ',';
        h += name;
        h += "_logit";
    }
    return h;
}

std::string dataset_csv_header(std::size_t feature_dim) {
    std::string h = label_csv_header();
    for (std::size_t i = 0; i < feature_dim; ++i) h += ",f" + std::to_string(i);
    return h;
}

LabelledDataset parse_label_file(std::string_view csv_text) {
    return parse_rows(csv_text, /*with_features=*/false);
}

LabelledDataset parse_dataset_file(std::string_view csv_text) {
    return parse_rows(csv_text, /*with_features=*/true);
}

LabelledDataset parse_label_or_dataset_file(std::string_view csv_text) {
    auto lines = split_lines(csv_text);
    if (lines.empty()) throw FormatError("empty file: header row missing");
    const bool has_features = split_fields(lines[0]).size() > 2 + kNumAus;
    return parse_rows(csv_text, has_features);
}

std::string write_label_csv(const LabelledDataset& ds, bool clean_channel) {
    std::string out = label_csv_header();
    out += '\n';
    for (const auto& s : ds.samples) {
        check_no_reserved_chars(s.video_id);
        append_key(out, s);
        append_labels(out, clean_channel ? s.clean_labels : s.labels);
        out += '\n';
    }
    return out;
}

std::string write_dataset_csv(const LabelledDataset& ds) {
    std::string out = dataset_csv_header(ds.feature_dim);
    out += '\n';
    for (const auto& s : ds.samples) {
        check_no_reserved_chars(s.video_id);
        append_key(out, s);
        append_labels(out, s.labels);
        for (double f : s.features) {
            out += ',';
            out += format_double(f);
        }
        out += '\n';
    }
    return out;
}

PredictionRun parse_prediction_file(std::string_view csv_text) {
    auto lines = split_lines(csv_text);
    if (lines.empty()) throw FormatError("empty file: header row missing");
    auto header = split_fields(lines[0]);
    const std::string expected_header = prediction_csv_header();
    auto expected = split_fields(expected_header);
    for (std::size_t i = 0; i < expected.size(); ++i) {
        if (i >= header.size())
            throw FormatError("malformed header: missing column '" + std::string(expected[i]) + "'");
        if (header[i] != expected[i])
            throw FormatError("malformed header: expected column '" + std::string(expected[i]) +
                              "', got '" + std::string(header[i]) + "'");
    }
    if (header.size() != expected.size())
        throw FormatError("malformed header: unexpected extra column '" +
                          std::string(header[expected.size()]) + "'");

    std::vector<PredictionEntry> entries;
    entries.reserve(lines.size() - 1);
    for (std::size_t row = 1; row < lines.size(); ++row) {
        auto fields = split_fields(lines[row]);
        if (fields.size() != 2 + kNumAus)
            throw FormatError("row " + std::to_string(row) + ": expected " +
                              std::to_string(2 + kNumAus) + " fields, got " +
                              std::to_string(fields.size()));
        PredictionEntry e;
        e.video_id = std::string(fields[0]);
        e.frame_idx = parse_frame(fields[1], row);
        for (int k = 0; k < kNumAus; ++k)
            e.logits[static_cast<std::size_t>(k)] =
                parse_float(fields[2 + static_cast<std::size_t>(k)], row,
                            std::string(kAuNames[static_cast<std::size_t>(k)]) + "_logit");
        entries.push_back(std::move(e));
    }
    return PredictionRun::build(std::move(entries));
}

std::string write_prediction_csv(const PredictionRun& run) {
    if (run.empty()) throw ValueError("write_predictions: run is empty");
    std::string out = prediction_csv_header();
    out += '\n';
    for (const auto& e : run.entries) {
        check_no_reserved_chars(e.video_id);
        out += e.video_id;
        out += ',';
        out += std::to_string(e.frame_idx);
        for (double v : e.logits) {
            out += ',';
            out += format_double(v);
        }
        out += '\n';
    }
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("read failure: " + path);
    return ss.str();
}

void write_text_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failure: " + path);
}

LabelledDataset load_label_file(const std::string& path) {
    return parse_label_file(read_text_file(path));
}

LabelledDataset load_dataset_file(const std::string& path) {
    return parse_dataset_file(read_text_file(path));
}

LabelledDataset load_label_or_dataset_file(const std::string& path) {
    return parse_label_or_dataset_file(read_text_file(path));
}

PredictionRun load_prediction_file(const std::string& path) {
    return parse_prediction_file(read_text_file(path));
}

void write_predictions(const PredictionRun& run, const std::string& path) {
    const std::string csv = write_prediction_csv(run);  // validates before file creation
    write_text_file(path, csv);
}

}  // namespace aupipe
