#pragma once

#include <string>
#include <string_view>

#include "aupipe/predictions.hpp"
#include "aupipe/types.hpp"

namespace aupipe {

// Column layouts.
//   label file:      video_id,frame,AU1,...,AU26            cells in {0,1,-1}
//   dataset file:    label columns + f0,...,f{D-1}          features as floats
//   prediction file: video_id,frame,AU1_logit,...,AU26_logit
//
// Floats are written with up to 17 significant digits so that every file
// round-trips through its parser bit-identically.

std::string label_csv_header();
std::string prediction_csv_header();
std::string dataset_csv_header(std::size_t feature_dim);

// Label files (labels only; -1 maps to Invalid).
LabelledDataset parse_label_file(std::string_view csv_text);
std::string write_label_csv(const LabelledDataset& ds, bool clean_channel = false);

// Dataset files (labels + feature columns).
LabelledDataset parse_dataset_file(std::string_view csv_text);
std::string write_dataset_csv(const LabelledDataset& ds);

// Auto-detects label vs dataset layout from the header.
LabelledDataset parse_label_or_dataset_file(std::string_view csv_text);

// Prediction files.
PredictionRun parse_prediction_file(std::string_view csv_text);
std::string write_prediction_csv(const PredictionRun& run);

// File wrappers. Readers throw IoError for missing paths; writers throw
// IoError for unwritable ones. write_predictions rejects empty runs before
// touching the filesystem.
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view content);

LabelledDataset load_label_file(const std::string& path);
LabelledDataset load_dataset_file(const std::string& path);
LabelledDataset load_label_or_dataset_file(const std::string& path);
PredictionRun load_prediction_file(const std::string& path);
void write_predictions(const PredictionRun& run, const std::string& path);

// Shortest-exact double formatting used across all emitted artifacts.
std::string format_double(double v);

}  // namespace aupipe
