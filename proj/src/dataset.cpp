#include "uep/dataset.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>

#include "uep/rng.hpp"

namespace uep {

namespace {

std::uint32_t read_be32(std::ifstream& in, const std::string& path) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw std::runtime_error("truncated idx file: " + path);
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
           (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

}  // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path,
                 int limit) {
    std::ifstream images(images_path, std::ios::binary);
    if (!images) throw std::runtime_error("cannot open idx images: " + images_path);
    std::ifstream labels(labels_path, std::ios::binary);
    if (!labels) throw std::runtime_error("cannot open idx labels: " + labels_path);

    if (read_be32(images, images_path) != 2051)
        throw std::runtime_error("bad idx image magic in " + images_path);
    std::uint32_t count = read_be32(images, images_path);
    const std::uint32_t rows = read_be32(images, images_path);
    const std::uint32_t cols = read_be32(images, images_path);

    if (read_be32(labels, labels_path) != 2049)
        throw std::runtime_error("bad idx label magic in " + labels_path);
    const std::uint32_t label_count = read_be32(labels, labels_path);
    if (label_count < count) count = label_count;
    if (limit > 0 && static_cast<std::uint32_t>(limit) < count) count = limit;

    Dataset data;
    data.features.resize(count, static_cast<long>(rows) * cols);
    data.labels.resize(count);
    std::vector<unsigned char> pixel(static_cast<std::size_t>(rows) * cols);
    for (std::uint32_t i = 0; i < count; ++i) {
        images.read(reinterpret_cast<char*>(pixel.data()), pixel.size());
        if (!images) throw std::runtime_error("truncated idx file: " + images_path);
        for (std::size_t j = 0; j < pixel.size(); ++j)
            data.features(i, j) = pixel[j] / 255.0;
        unsigned char lab;
        labels.read(reinterpret_cast<char*>(&lab), 1);
        if (!labels) throw std::runtime_error("truncated idx file: " + labels_path);
        data.labels[i] = lab;
    }
    return data;
}

std::vector<std::string> idx_paths(const std::string& dir, bool train) {
    const std::string stem = train ? "train" : "t10k";
    return {dir + "/" + stem + "-images-idx3-ubyte", dir + "/" + stem + "-labels-idx1-ubyte"};
}

bool idx_available(const std::string& dir, bool train) {
    for (const std::string& p : idx_paths(dir, train))
        if (!std::filesystem::exists(p)) return false;
    return true;
}

Dataset load_idx_dir(const std::string& dir, bool train, int limit) {
    const auto paths = idx_paths(dir, train);
    if (!idx_available(dir, train))
        throw std::runtime_error("missing idx dataset files; expected " + paths[0] +
                                 " and " + paths[1]);
    return load_idx(paths[0], paths[1], limit);
}

Dataset synthetic_blobs(int samples, int dims, int classes, std::uint64_t seed,
                        int split) {
    std::mt19937_64 task_rng = substream(seed, 0xb10b5);
    std::normal_distribution<double> unit(0.0, 1.0);

    // decaying per-feature scale; the head features carry most of the energy
    std::vector<double> scale(dims);
    for (int j = 0; j < dims; ++j)
        scale[j] = 1.2 * std::exp(-6.0 * j / dims) + 0.04;

    // the task (class means) is a function of the seed alone
    Matrix means(classes, dims);
    for (int c = 0; c < classes; ++c)
        for (int j = 0; j < dims; ++j) means(c, j) = 0.5 * scale[j] * unit(task_rng);

    std::mt19937_64 sample_rng = substream(seed, 0x5a3b1e + split);
    Dataset data;
    data.num_classes = classes;
    data.features.resize(samples, dims);
    data.labels.resize(samples);
    for (int i = 0; i < samples; ++i) {
        const int c = i % classes;
        data.labels[i] = c;
        for (int j = 0; j < dims; ++j)
            data.features(i, j) = means(c, j) + scale[j] * unit(sample_rng);
    }
    return data;
}

}  // namespace uep
