#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "binnet/tensor.hpp"

namespace binnet {

// Pixels are [3,H,W] floats in [0,1].
struct LabeledImage {
    Tensor pixels;
    int label = 0;
    std::string source_id;
};

using ClassCatalog = std::vector<std::string>;

// The canonical waste catalog, in fixed order.
const ClassCatalog& waste_catalog();

struct DatasetSplit {
    std::vector<LabeledImage> train;
    std::vector<LabeledImage> validation;
    std::vector<LabeledImage> test;
    std::uint64_t split_seed = 0;
};

// Binary PPM (P6, maxval 255).
Tensor read_ppm(const std::string& path);
void write_ppm(const std::string& path, const Tensor& image);

// Expects one subdirectory per catalog label under root, each holding P6 PPM
// files. Files are loaded in lexicographic order per class, classes in
// catalog order. Unknown subdirectories are skipped with a warning on stderr.
std::vector<LabeledImage> load_directory_dataset(const std::string& root,
                                                 const ClassCatalog& catalog);

// Per class of size n: train = floor(r0*n), validation = floor(r1*n),
// test = the remainder. Assignment within a class is a seeded shuffle.
DatasetSplit stratified_split(const std::vector<LabeledImage>& images,
                              double train_ratio, double validation_ratio,
                              double test_ratio, std::uint64_t seed);

inline DatasetSplit stratified_split(const std::vector<LabeledImage>& images,
                                     std::uint64_t seed) {
    return stratified_split(images, 0.50, 0.25, 0.25, seed);
}

// Corner-aligned bilinear resampling.
Tensor resize_bilinear(const Tensor& image, std::int64_t out_h, std::int64_t out_w);

enum class SyntheticTask { source, target };

struct SyntheticDataset {
    std::vector<LabeledImage> images;
    ClassCatalog catalog;
};

// Procedurally drawn classification tasks. The source task draws six pattern
// classes; the target task draws six related but distinct classes so that
// features transfer without the tasks being identical. Fully determined by
// the seed.
SyntheticDataset synthesize_dataset(SyntheticTask task, int n_per_class,
                                    std::int64_t height, std::int64_t width,
                                    std::uint64_t seed);

// Machine-readable key=value per-split class counts.
std::string dataset_manifest(const DatasetSplit& split, const ClassCatalog& catalog);

} // namespace binnet
