#pragma once

#include <string>
#include <vector>

#include "uep/block_partition.hpp"

namespace uep {

struct Dataset {
    Matrix features;  // one sample per row
    std::vector<int> labels;
    int num_classes = 10;

    int size() const { return static_cast<int>(features.rows()); }
    int dims() const { return static_cast<int>(features.cols()); }
};

// IDX files with big-endian magics 2051 (images) and 2049 (labels). Pixel
// values are scaled to [0, 1]. limit > 0 keeps only the first samples.
Dataset load_idx(const std::string& images_path, const std::string& labels_path,
                 int limit = -1);

// Expected IDX file names under a directory, train or test split.
std::vector<std::string> idx_paths(const std::string& dir, bool train);
bool idx_available(const std::string& dir, bool train);
Dataset load_idx_dir(const std::string& dir, bool train, int limit = -1);

// Hermetic stand-in when no IDX files are around: Gaussian class blobs whose
// per-feature scale decays across the feature index, so feature norms are
// strongly uneven the way natural image data is. The class means depend only
// on `seed`; `split` selects an independent sample stream, so split 0 and
// split 1 of one seed are a matching train/test pair.
Dataset synthetic_blobs(int samples, int dims, int classes, std::uint64_t seed,
                        int split = 0);

}  // namespace uep
