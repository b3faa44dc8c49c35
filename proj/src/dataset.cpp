#include "binnet/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "binnet/errors.hpp"
#include "binnet/rng.hpp"

namespace fs = std::filesystem;

namespace binnet {

const ClassCatalog& waste_catalog() {
    static const ClassCatalog catalog = {"cardboard", "glass",   "metal",
                                         "paper",     "plastic", "other"};
    return catalog;
}

namespace {

// Skips PPM whitespace and '#' comments between header tokens.
int next_header_token(std::istream& in, const std::string& path) {
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (!std::isspace(c)) {
            break;
        }
        c = in.get();
    }
    if (c == EOF) throw format_error("malformed PPM (unexpected end of header): " + path);
    return c;
}

std::int64_t read_header_int(std::istream& in, const std::string& path) {
    int c = next_header_token(in, path);
    if (!std::isdigit(c)) throw format_error("malformed PPM (expected integer): " + path);
    std::int64_t v = 0;
    while (c != EOF && std::isdigit(c)) {
        v = v * 10 + (c - '0');
        if (v > (1 << 24)) throw format_error("malformed PPM (implausible dimension): " + path);
        c = in.get();
    }
    if (c != EOF && !std::isspace(c))
        throw format_error("malformed PPM (bad integer terminator): " + path);
    return v;
}

} // namespace

Tensor read_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open image: " + path);
    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (!in || m0 != 'P' || m1 != '6')
        throw format_error("malformed PPM (magic is not P6): " + path);
    const std::int64_t w = read_header_int(in, path);
    const std::int64_t h = read_header_int(in, path);
    const std::int64_t maxval = read_header_int(in, path);
    if (w < 1 || h < 1) throw format_error("malformed PPM (empty image): " + path);
    if (maxval != 255) throw format_error("malformed PPM (maxval must be 255): " + path);

    std::vector<unsigned char> raw(static_cast<std::size_t>(w * h * 3));
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
        throw format_error("malformed PPM (truncated pixel data): " + path);

    Tensor img({3, h, w});
    for (std::int64_t y = 0; y < h; ++y)
        for (std::int64_t x = 0; x < w; ++x)
            for (std::int64_t c = 0; c < 3; ++c)
                img[(c * h + y) * w + x] =
                    static_cast<float>(raw[static_cast<std::size_t>((y * w + x) * 3 + c)]) / 255.0f;
    return img;
}

void write_ppm(const std::string& path, const Tensor& image) {
    if (image.rank() != 3 || image.dim(0) != 3)
        throw dimension_error("write_ppm expects a [3,H,W] tensor, got " +
                              shape_str(image.shape()));
    const std::int64_t h = image.dim(1), w = image.dim(2);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw io_error("cannot open image for writing: " + path);
    out << "P6\n" << w << " " << h << "\n255\n";
    std::vector<unsigned char> raw(static_cast<std::size_t>(w * h * 3));
    for (std::int64_t y = 0; y < h; ++y)
        for (std::int64_t x = 0; x < w; ++x)
            for (std::int64_t c = 0; c < 3; ++c) {
                float v = std::clamp(image[(c * h + y) * w + x], 0.0f, 1.0f);
                raw[static_cast<std::size_t>((y * w + x) * 3 + c)] =
                    static_cast<unsigned char>(std::lround(v * 255.0f));
            }
    out.write(reinterpret_cast<const char*>(raw.data()),
              static_cast<std::streamsize>(raw.size()));
    if (!out) throw io_error("image write failed: " + path);
}

std::vector<LabeledImage> load_directory_dataset(const std::string& root,
                                                 const ClassCatalog& catalog) {
    if (!fs::is_directory(root)) throw data_error("dataset root is not a directory: " + root);

    for (const auto& entry : fs::directory_iterator(root)) {
        if (!entry.is_directory()) continue;
        const std::string name = entry.path().filename().string();
        if (std::find(catalog.begin(), catalog.end(), name) == catalog.end())
            std::cerr << "warning: skipping unknown class directory " << entry.path()
                      << "\n";
    }

    std::vector<LabeledImage> images;
    for (std::size_t label = 0; label < catalog.size(); ++label) {
        const fs::path class_dir = fs::path(root) / catalog[label];
        if (!fs::is_directory(class_dir)) continue;
        std::vector<std::string> files;
        for (const auto& entry : fs::directory_iterator(class_dir))
            if (entry.is_regular_file()) files.push_back(entry.path().filename().string());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            LabeledImage img;
            img.pixels = read_ppm((class_dir / f).string());
            img.label = static_cast<int>(label);
            img.source_id = catalog[label] + "/" + f;
            images.push_back(std::move(img));
        }
    }
    return images;
}

DatasetSplit stratified_split(const std::vector<LabeledImage>& images,
                              double train_ratio, double validation_ratio,
                              double test_ratio, std::uint64_t seed) {
    if (images.empty()) throw config_error("cannot split an empty dataset");
    if (train_ratio < 0 || validation_ratio < 0 || test_ratio < 0 ||
        std::abs(train_ratio + validation_ratio + test_ratio - 1.0) > 1e-9)
        throw config_error("split ratios must be non-negative and sum to 1");

    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < images.size(); ++i)
        by_class[images[i].label].push_back(i);

    DatasetSplit split;
    split.split_seed = seed;
    for (auto& [label, indices] : by_class) {
        Rng rng(Rng::derive(seed, static_cast<std::uint64_t>(label)));
        for (std::size_t i = indices.size(); i > 1; --i)
            std::swap(indices[i - 1], indices[rng.below(i)]);

        const auto n = static_cast<std::int64_t>(indices.size());
        // tiny epsilon so exact products like 0.25*n are not floored away
        const auto n_train = static_cast<std::int64_t>(
            std::floor(train_ratio * static_cast<double>(n) + 1e-9));
        const auto n_val = static_cast<std::int64_t>(
            std::floor(validation_ratio * static_cast<double>(n) + 1e-9));
        for (std::int64_t i = 0; i < n; ++i) {
            const auto& img = images[indices[static_cast<std::size_t>(i)]];
            if (i < n_train)
                split.train.push_back(img);
            else if (i < n_train + n_val)
                split.validation.push_back(img);
            else
                split.test.push_back(img);
        }
    }
    return split;
}

Tensor resize_bilinear(const Tensor& image, std::int64_t out_h, std::int64_t out_w) {
    if (image.rank() != 3) throw dimension_error("resize_bilinear expects [C,H,W]");
    if (out_h < 1 || out_w < 1) throw param_error("resize target dims must be >= 1");
    const std::int64_t c_count = image.dim(0), h = image.dim(1), w = image.dim(2);

    Tensor out({c_count, out_h, out_w});
    const double sy = out_h > 1 ? static_cast<double>(h - 1) / static_cast<double>(out_h - 1) : 0.0;
    const double sx = out_w > 1 ? static_cast<double>(w - 1) / static_cast<double>(out_w - 1) : 0.0;
    for (std::int64_t oy = 0; oy < out_h; ++oy) {
        const double fy = static_cast<double>(oy) * sy;
        const auto y0 = static_cast<std::int64_t>(std::floor(fy));
        const std::int64_t y1 = std::min(y0 + 1, h - 1);
        const double wy = fy - static_cast<double>(y0);
        for (std::int64_t ox = 0; ox < out_w; ++ox) {
            const double fx = static_cast<double>(ox) * sx;
            const auto x0 = static_cast<std::int64_t>(std::floor(fx));
            const std::int64_t x1 = std::min(x0 + 1, w - 1);
            const double wx = fx - static_cast<double>(x0);
            for (std::int64_t c = 0; c < c_count; ++c) {
                const double top = (1.0 - wx) * image[(c * h + y0) * w + x0] +
                                   wx * image[(c * h + y0) * w + x1];
                const double bot = (1.0 - wx) * image[(c * h + y1) * w + x0] +
                                   wx * image[(c * h + y1) * w + x1];
                out[(c * out_h + oy) * out_w + ox] =
                    static_cast<float>((1.0 - wy) * top + wy * bot);
            }
        }
    }
    return out;
}

namespace {

struct Palette {
    float fg[3];
    float bg[3];
};

// Foreground is always brighter than background, so class structure survives
// in pixel statistics and features carry across the two tasks.
Palette draw_palette(Rng& rng) {
    Palette p;
    for (auto& v : p.fg) v = static_cast<float>(rng.uniform(0.5, 0.95));
    for (auto& v : p.bg) v = static_cast<float>(rng.uniform(0.05, 0.45));
    return p;
}

void fill_bg(Tensor& img, const Palette& p) {
    const std::int64_t hw = img.dim(1) * img.dim(2);
    for (std::int64_t c = 0; c < 3; ++c)
        for (std::int64_t i = 0; i < hw; ++i) img[c * hw + i] = p.bg[c];
}

void set_px(Tensor& img, std::int64_t y, std::int64_t x, const float rgb[3]) {
    const std::int64_t h = img.dim(1), w = img.dim(2);
    for (std::int64_t c = 0; c < 3; ++c) img[(c * h + y) * w + x] = rgb[c];
}

// Small per-pixel brightness jitter so no two images of a class are equal.
void add_noise(Tensor& img, Rng& rng, double amplitude) {
    for (std::int64_t i = 0; i < img.size(); ++i) {
        const double v = img[i] + rng.uniform(-amplitude, amplitude);
        img[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
}

Tensor draw_synthetic(SyntheticTask task, int cls, std::int64_t h, std::int64_t w,
                      Rng& rng) {
    Tensor img({3, h, w});
    const Palette pal = draw_palette(rng);
    fill_bg(img, pal);
    const std::int64_t period = 4 + 2 * static_cast<std::int64_t>(rng.below(3)); // 4, 6, 8
    const auto phase = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(period)));

    if (task == SyntheticTask::source) {
        switch (cls) {
            case 0: // horizontal stripes
                for (std::int64_t y = 0; y < h; ++y)
                    if (((y + phase) % period) < period / 2)
                        for (std::int64_t x = 0; x < w; ++x) set_px(img, y, x, pal.fg);
                break;
            case 1: // vertical stripes
                for (std::int64_t x = 0; x < w; ++x)
                    if (((x + phase) % period) < period / 2)
                        for (std::int64_t y = 0; y < h; ++y) set_px(img, y, x, pal.fg);
                break;
            case 2: // checkerboard
                for (std::int64_t y = 0; y < h; ++y)
                    for (std::int64_t x = 0; x < w; ++x)
                        if ((((x + phase) / (period / 2)) + ((y + phase) / (period / 2))) % 2 == 0)
                            set_px(img, y, x, pal.fg);
                break;
            case 3: { // filled circle
                const double r = rng.uniform(0.22, 0.38) * static_cast<double>(std::min(h, w));
                const double cy = static_cast<double>(h) / 2 + rng.uniform(-0.08, 0.08) * static_cast<double>(h);
                const double cx = static_cast<double>(w) / 2 + rng.uniform(-0.08, 0.08) * static_cast<double>(w);
                for (std::int64_t y = 0; y < h; ++y)
                    for (std::int64_t x = 0; x < w; ++x) {
                        const double dy = static_cast<double>(y) - cy, dx = static_cast<double>(x) - cx;
                        if (dy * dy + dx * dx <= r * r) set_px(img, y, x, pal.fg);
                    }
                break;
            }
            case 4: { // filled triangle, apex up
                const double base = rng.uniform(0.5, 0.8) * static_cast<double>(w);
                const double height = rng.uniform(0.5, 0.8) * static_cast<double>(h);
                const double cy = static_cast<double>(h) / 2, cx = static_cast<double>(w) / 2;
                for (std::int64_t y = 0; y < h; ++y)
                    for (std::int64_t x = 0; x < w; ++x) {
                        const double t = (static_cast<double>(y) - (cy - height / 2)) / height;
                        if (t < 0 || t > 1) continue;
                        const double half = t * base / 2;
                        if (std::abs(static_cast<double>(x) - cx) <= half) set_px(img, y, x, pal.fg);
                    }
                break;
            }
            default: // uniform noise
                for (std::int64_t i = 0; i < img.size(); ++i)
                    img[i] = static_cast<float>(rng.next_double());
                break;
        }
    } else {
        switch (cls) {
            case 0: // diagonal stripes
                for (std::int64_t y = 0; y < h; ++y)
                    for (std::int64_t x = 0; x < w; ++x)
                        if (((x + y + phase) % period) < period / 2) set_px(img, y, x, pal.fg);
                break;
            case 1: { // ring
                const double r = rng.uniform(0.25, 0.38) * static_cast<double>(std::min(h, w));
                const double width = rng.uniform(0.08, 0.14) * static_cast<double>(std::min(h, w));
                const double cy = static_cast<double>(h) / 2 + rng.uniform(-0.12, 0.12) * static_cast<double>(h);
                const double cx = static_cast<double>(w) / 2 + rng.uniform(-0.12, 0.12) * static_cast<double>(w);
                for (std::int64_t y = 0; y < h; ++y)
                    for (std::int64_t x = 0; x < w; ++x) {
                        const double dy = static_cast<double>(y) - cy, dx = static_cast<double>(x) - cx;
                        const double d = std::sqrt(dy * dy + dx * dx);
                        if (std::abs(d - r) <= width) set_px(img, y, x, pal.fg);
                    }
                break;
            }
            case 2: { // cross
                const auto bar = static_cast<std::int64_t>(
                    rng.uniform(0.08, 0.16) * static_cast<double>(std::min(h, w)));
                const std::int64_t cy = h / 2 + static_cast<std::int64_t>(rng.below(5)) - 2;
                const std::int64_t cx = w / 2 + static_cast<std::int64_t>(rng.below(5)) - 2;
                for (std::int64_t y = 0; y < h; ++y)
                    for (std::int64_t x = 0; x < w; ++x)
                        if (std::llabs(y - cy) <= bar || std::llabs(x - cx) <= bar)
                            set_px(img, y, x, pal.fg);
                break;
            }
            case 3: { // linear gradient between bg and fg
                const bool horizontal = rng.bernoulli(0.5);
                for (std::int64_t y = 0; y < h; ++y)
                    for (std::int64_t x = 0; x < w; ++x) {
                        const double t = horizontal
                                             ? static_cast<double>(x) / static_cast<double>(w - 1)
                                             : static_cast<double>(y) / static_cast<double>(h - 1);
                        float rgb[3];
                        for (int c = 0; c < 3; ++c)
                            rgb[c] = static_cast<float>((1 - t) * pal.bg[c] + t * pal.fg[c]);
                        set_px(img, y, x, rgb);
                    }
                break;
            }
            case 4: { // speckle: sparse bright dots
                const std::int64_t dots = (h * w) / 24;
                for (std::int64_t i = 0; i < dots; ++i) {
                    const auto y = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(h)));
                    const auto x = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(w)));
                    set_px(img, y, x, pal.fg);
                }
                break;
            }
            default: // blank: solid background only
                break;
        }
    }
    add_noise(img, rng, 0.25);
    return img;
}

} // namespace

SyntheticDataset synthesize_dataset(SyntheticTask task, int n_per_class,
                                    std::int64_t height, std::int64_t width,
                                    std::uint64_t seed) {
    if (n_per_class < 1) throw config_error("n_per_class must be >= 1");
    if (height < 8 || width < 8) throw config_error("synthetic resolution must be at least 8x8");

    SyntheticDataset ds;
    ds.catalog = task == SyntheticTask::source
                     ? ClassCatalog{"hstripes", "vstripes", "checker", "circle", "triangle", "noise"}
                     : ClassCatalog{"dstripes", "rings", "crosses", "gradient", "speckle", "blank"};

    const std::uint64_t task_tag = task == SyntheticTask::source ? 0x535243ULL : 0x544754ULL;
    for (int cls = 0; cls < 6; ++cls) {
        for (int i = 0; i < n_per_class; ++i) {
            const std::uint64_t stream =
                task_tag ^ (static_cast<std::uint64_t>(cls) << 32) ^ static_cast<std::uint64_t>(i);
            Rng rng(Rng::derive(seed, stream));
            LabeledImage img;
            img.pixels = draw_synthetic(task, cls, height, width, rng);
            img.label = cls;
            char buf[64];
            std::snprintf(buf, sizeof buf, "%s/%04d", ds.catalog[static_cast<std::size_t>(cls)].c_str(), i);
            img.source_id = buf;
            ds.images.push_back(std::move(img));
        }
    }
    return ds;
}

std::string dataset_manifest(const DatasetSplit& split, const ClassCatalog& catalog) {
    std::ostringstream out;
    out << "classes=" << catalog.size() << "\n";
    out << "split.seed=" << split.split_seed << "\n";
    const std::vector<std::pair<const char*, const std::vector<LabeledImage>*>> parts = {
        {"train", &split.train}, {"validation", &split.validation}, {"test", &split.test}};
    for (const auto& [name, images] : parts) {
        std::vector<std::size_t> counts(catalog.size(), 0);
        for (const auto& img : *images)
            if (img.label >= 0 && static_cast<std::size_t>(img.label) < counts.size())
                ++counts[static_cast<std::size_t>(img.label)];
        for (std::size_t c = 0; c < catalog.size(); ++c)
            out << "count." << name << "." << catalog[c] << "=" << counts[c] << "\n";
        out << "count." << name << ".total=" << images->size() << "\n";
    }
    out << "count.total="
        << split.train.size() + split.validation.size() + split.test.size() << "\n";
    return out.str();
}

} // namespace binnet
