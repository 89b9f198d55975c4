#include "hw/bundle.hpp"

#include <json.hpp>

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace hw::bundle {

static_assert(std::endian::native == std::endian::little,
              "tensor format assumes a little-endian host");

namespace {

using nlohmann::json;

void write_file_atomic(const std::filesystem::path& path, const char* data, std::size_t size) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write " + tmp.string());
        out.write(data, static_cast<std::streamsize>(size));
        if (!out) throw DataError("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    return j;
}

}  // namespace

void atomic_write(const std::filesystem::path& path, const std::string& content) {
    write_file_atomic(path, content.data(), content.size());
}

void save_tensor(const std::filesystem::path& path, const Tensor& t) {
    std::size_t expected = 1;
    for (std::uint32_t d : t.dims) expected *= d;
    if (expected != t.data.size()) throw DataError("save_tensor: dims do not match data length");

    std::string buf;
    buf.reserve(4 + 4 + 4 * t.dims.size() + 4 * t.data.size());
    buf.append("HWT1", 4);
    const std::uint32_t rank = static_cast<std::uint32_t>(t.dims.size());
    buf.append(reinterpret_cast<const char*>(&rank), 4);
    for (std::uint32_t d : t.dims) buf.append(reinterpret_cast<const char*>(&d), 4);
    buf.append(reinterpret_cast<const char*>(t.data.data()), 4 * t.data.size());
    write_file_atomic(path, buf.data(), buf.size());
}

Tensor load_tensor(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, "HWT1", 4) != 0)
        throw DataError(path.string() + ": bad tensor magic");
    std::uint32_t rank;
    if (!in.read(reinterpret_cast<char*>(&rank), 4) || rank > 8)
        throw DataError(path.string() + ": bad tensor rank");
    Tensor t;
    t.dims.resize(rank);
    std::size_t count = 1;
    for (std::uint32_t& d : t.dims) {
        if (!in.read(reinterpret_cast<char*>(&d), 4)) throw DataError(path.string() + ": truncated dims");
        count *= d;
    }
    t.data.resize(count);
    if (!in.read(reinterpret_cast<char*>(t.data.data()), static_cast<std::streamsize>(4 * count)))
        throw DataError(path.string() + ": truncated tensor data");
    return t;
}

std::vector<double> face_pyramid_ratios() {
    std::vector<double> ratios{0.26, 0.28};
    for (int i = 0; i < 18; ++i) ratios.push_back(0.32 + 0.04 * i);
    ratios.back() = 1.0;  // exact
    return ratios;
}

namespace {

json lowlevel_to_json(const features::LowLevelConfig& c) {
    return json{
        {"kind", static_cast<int>(c.kind)},
        {"gabor",
         {{"orientations", c.gabor.orientations},
          {"phases", c.gabor.phases},
          {"kernel_size", c.gabor.kernel_size},
          {"wavelength", c.gabor.wavelength},
          {"sigma", c.gabor.sigma}}},
        {"hog", {{"cell_size", c.hog.cell_size}, {"bins", c.hog.bins}}},
        {"pca",
         {{"patch_size", c.pca.patch_size},
          {"filter_count", c.pca.filter_count},
          {"train_patch_count", c.pca.train_patch_count}}},
    };
}

features::LowLevelConfig lowlevel_from_json(const json& j) {
    features::LowLevelConfig c;
    c.kind = static_cast<features::LowLevelKind>(j.at("kind").get<int>());
    c.gabor.orientations = j.at("gabor").at("orientations");
    c.gabor.phases = j.at("gabor").at("phases");
    c.gabor.kernel_size = j.at("gabor").at("kernel_size");
    c.gabor.wavelength = j.at("gabor").at("wavelength");
    c.gabor.sigma = j.at("gabor").at("sigma");
    c.hog.cell_size = j.at("hog").at("cell_size");
    c.hog.bins = j.at("hog").at("bins");
    c.pca.patch_size = j.at("pca").at("patch_size");
    c.pca.filter_count = j.at("pca").at("filter_count");
    c.pca.train_patch_count = j.at("pca").at("train_patch_count");
    return c;
}

void check_version(const json& manifest, const std::filesystem::path& dir) {
    if (!manifest.contains("version") || manifest["version"] != kBundleVersion)
        throw ModelMismatchError(dir.string() + ": bundle version mismatch");
}

Tensor load_declared_tensor(const json& manifest, const std::filesystem::path& dir,
                            const std::string& name) {
    if (!manifest.contains("tensors") || !manifest["tensors"].contains(name))
        throw DataError(dir.string() + ": manifest missing tensor " + name);
    const json& decl = manifest["tensors"][name];
    const std::filesystem::path path = dir / decl.at("file").get<std::string>();
    if (!std::filesystem::exists(path)) throw DataError(path.string() + ": missing tensor file");
    Tensor t = load_tensor(path);
    const std::vector<std::uint32_t> dims = decl.at("dims").get<std::vector<std::uint32_t>>();
    if (t.dims != dims) throw ModelMismatchError(path.string() + ": tensor shape mismatch");
    return t;
}

json declare_and_save(const std::filesystem::path& dir, const std::string& name, const Tensor& t) {
    const std::string file = name + ".hwt";
    save_tensor(dir / file, t);
    return json{{"file", file}, {"dims", t.dims}};
}

}  // namespace

void save_layer2(const std::filesystem::path& dir, const Layer2Pipeline& p) {
    std::filesystem::create_directories(dir);
    json manifest;
    manifest["version"] = kBundleVersion;
    manifest["type"] = "layer2";
    manifest["lowlevel"] = lowlevel_to_json(p.lowlevel);
    manifest["resize_height"] = p.resize_height;
    manifest["pyramid_ratios"] = p.pyramid_ratios;
    manifest["bank"] = {{"base_count", p.bank.base_count},
                        {"variants_per_base", p.bank.variants_per_base},
                        {"height", p.bank.tpl_height},
                        {"width", p.bank.tpl_width},
                        {"depth", p.bank.tpl_depth}};

    Tensor templates;
    templates.dims = {static_cast<std::uint32_t>(p.bank.templates.size()),
                      static_cast<std::uint32_t>(p.bank.tpl_height),
                      static_cast<std::uint32_t>(p.bank.tpl_width),
                      static_cast<std::uint32_t>(p.bank.tpl_depth)};
    for (const auto& t : p.bank.templates)
        templates.data.insert(templates.data.end(), t.data.begin(), t.data.end());
    manifest["tensors"]["templates"] = declare_and_save(dir, "templates", templates);

    if (!p.pca_bank.filters.empty()) {
        Tensor filters;
        filters.dims = {static_cast<std::uint32_t>(p.pca_bank.filters.size()),
                        static_cast<std::uint32_t>(p.pca_bank.height),
                        static_cast<std::uint32_t>(p.pca_bank.width)};
        for (const auto& f : p.pca_bank.filters)
            filters.data.insert(filters.data.end(), f.begin(), f.end());
        manifest["tensors"]["pca_filters"] = declare_and_save(dir, "pca_filters", filters);
    }

    if (p.bank.reduced) {
        const auto& rb = *p.bank.reduced;
        Tensor mean{{static_cast<std::uint32_t>(rb.mean.size())},
                    std::vector<float>(rb.mean.data(), rb.mean.data() + rb.mean.size())};
        Tensor eig{{static_cast<std::uint32_t>(rb.eigenvectors.rows()),
                    static_cast<std::uint32_t>(rb.eigenvectors.cols())},
                   std::vector<float>(rb.eigenvectors.size())};
        Eigen::Map<Eigen::MatrixXf>(eig.data.data(), rb.eigenvectors.rows(),
                                    rb.eigenvectors.cols()) = rb.eigenvectors;
        manifest["tensors"]["basis_mean"] = declare_and_save(dir, "basis_mean", mean);
        manifest["tensors"]["basis_eigvecs"] = declare_and_save(dir, "basis_eigvecs", eig);
        manifest["reduced_k"] = rb.k;
    }

    atomic_write(dir / "manifest.json", manifest.dump(2) + "\n");
}

Layer2Pipeline load_layer2(const std::filesystem::path& dir) {
    const json manifest = load_json(dir / "manifest.json");
    check_version(manifest, dir);
    if (manifest.at("type") != "layer2") throw ModelMismatchError(dir.string() + ": not a layer-2 bundle");

    Layer2Pipeline p;
    p.lowlevel = lowlevel_from_json(manifest.at("lowlevel"));
    p.resize_height = manifest.at("resize_height");
    p.pyramid_ratios = manifest.at("pyramid_ratios").get<std::vector<double>>();

    const json& bank = manifest.at("bank");
    p.bank.base_count = bank.at("base_count");
    p.bank.variants_per_base = bank.at("variants_per_base");
    p.bank.tpl_height = bank.at("height");
    p.bank.tpl_width = bank.at("width");
    p.bank.tpl_depth = bank.at("depth");

    const Tensor templates = load_declared_tensor(manifest, dir, "templates");
    const std::size_t tpl_size = static_cast<std::size_t>(p.bank.tpl_height) * p.bank.tpl_width *
                                 p.bank.tpl_depth;
    if (templates.dims[0] != static_cast<std::uint32_t>(p.bank.base_count * p.bank.variants_per_base))
        throw ModelMismatchError(dir.string() + ": template count inconsistent with bank metadata");
    for (std::uint32_t i = 0; i < templates.dims[0]; ++i) {
        FeatureMap t(p.bank.tpl_height, p.bank.tpl_width, p.bank.tpl_depth);
        std::copy_n(templates.data.begin() + static_cast<std::ptrdiff_t>(i * tpl_size), tpl_size,
                    t.data.begin());
        p.bank.templates.push_back(std::move(t));
    }

    if (manifest["tensors"].contains("pca_filters")) {
        const Tensor filters = load_declared_tensor(manifest, dir, "pca_filters");
        p.pca_bank.kind = features::FilterKind::EigenPatch;
        p.pca_bank.height = static_cast<int>(filters.dims[1]);
        p.pca_bank.width = static_cast<int>(filters.dims[2]);
        p.pca_bank.channels = 1;
        p.pca_bank.unit_norm = true;
        const std::size_t fsize = static_cast<std::size_t>(filters.dims[1]) * filters.dims[2];
        for (std::uint32_t i = 0; i < filters.dims[0]; ++i)
            p.pca_bank.filters.emplace_back(
                filters.data.begin() + static_cast<std::ptrdiff_t>(i * fsize),
                filters.data.begin() + static_cast<std::ptrdiff_t>((i + 1) * fsize));
    }

    if (manifest.contains("reduced_k")) {
        hwcore::ReducedBasis rb;
        rb.k = manifest.at("reduced_k");
        const Tensor mean = load_declared_tensor(manifest, dir, "basis_mean");
        const Tensor eig = load_declared_tensor(manifest, dir, "basis_eigvecs");
        rb.mean = Eigen::Map<const Eigen::VectorXf>(mean.data.data(),
                                                    static_cast<Eigen::Index>(mean.data.size()));
        rb.eigenvectors = Eigen::Map<const Eigen::MatrixXf>(eig.data.data(), eig.dims[0], eig.dims[1]);
        p.bank.reduced = std::move(rb);
    }
    return p;
}

void save_layer3(const std::filesystem::path& dir, const Layer3Pipeline& p) {
    std::filesystem::create_directories(dir);
    json manifest;
    manifest["version"] = kBundleVersion;
    manifest["type"] = "layer3";
    manifest["pooling"] = {{"kind", static_cast<int>(p.model.pooling.kind)},
                           {"p", p.model.pooling.p}};

    Tensor templates;
    std::size_t dim = 0, total = 0;
    std::vector<int> cell_sizes;
    json provenance = json::array();
    for (const auto& cell : p.model.cells) {
        cell_sizes.push_back(static_cast<int>(cell.templates.size()));
        total += cell.templates.size();
        for (const auto& t : cell.templates) {
            if (dim == 0) dim = t.size();
            templates.data.insert(templates.data.end(), t.begin(), t.end());
        }
        for (const auto& tag : cell.provenance) provenance.push_back(tag);
    }
    templates.dims = {static_cast<std::uint32_t>(total), static_cast<std::uint32_t>(dim)};
    manifest["cell_sizes"] = cell_sizes;
    manifest["provenance"] = provenance;
    manifest["tensors"]["l3_templates"] = declare_and_save(dir, "l3_templates", templates);
    atomic_write(dir / "manifest.json", manifest.dump(2) + "\n");
}

Layer3Pipeline load_layer3(const std::filesystem::path& dir) {
    const json manifest = load_json(dir / "manifest.json");
    check_version(manifest, dir);
    if (manifest.at("type") != "layer3") throw ModelMismatchError(dir.string() + ": not a layer-3 bundle");

    Layer3Pipeline p;
    p.model.pooling.kind = static_cast<hwcore::Pooling>(manifest.at("pooling").at("kind").get<int>());
    p.model.pooling.p = manifest.at("pooling").at("p");

    const Tensor templates = load_declared_tensor(manifest, dir, "l3_templates");
    const std::vector<int> cell_sizes = manifest.at("cell_sizes").get<std::vector<int>>();
    const std::size_t dim = templates.dims[1];
    std::size_t offset = 0;
    int module_id = 0;
    for (int size : cell_sizes) {
        hwcore::TemplateBook book;
        book.module_id = module_id++;
        for (int i = 0; i < size; ++i) {
            book.templates.emplace_back(
                templates.data.begin() + static_cast<std::ptrdiff_t>(offset),
                templates.data.begin() + static_cast<std::ptrdiff_t>(offset + dim));
            offset += dim;
        }
        p.model.cells.push_back(std::move(book));
    }
    if (offset != templates.data.size())
        throw ModelMismatchError(dir.string() + ": cell sizes inconsistent with template tensor");
    return p;
}

VideoManifest load_video_manifest(const std::filesystem::path& path) {
    const json j = load_json(path);
    if (!j.contains("entries")) throw DataError(path.string() + ": manifest missing entries");
    const std::filesystem::path base = path.parent_path();

    VideoManifest m;
    for (const json& e : j["entries"]) {
        VideoManifestEntry entry;
        entry.video_id = e.at("videoId");
        entry.fps = e.at("fps");
        if (!(entry.fps > 0.0)) throw DataError(path.string() + ": fps must be positive");
        for (const json& f : e.at("frames")) {
            std::filesystem::path fp = f.get<std::string>();
            if (fp.is_relative()) fp = base / fp;
            if (!std::filesystem::exists(fp)) throw DataError(fp.string() + ": missing frame file");
            entry.frame_paths.push_back(fp.string());
        }
        if (entry.frame_paths.empty()) throw DataError(path.string() + ": video without frames");
        m.entries.push_back(std::move(entry));
    }
    if (m.entries.empty()) throw DataError(path.string() + ": empty manifest");
    return m;
}

std::vector<eval::Pair> load_pairs_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::vector<eval::Pair> pairs;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        eval::Pair p;
        std::string label;
        if (!std::getline(ss, p.item_a, ',') || !std::getline(ss, p.item_b, ',') ||
            !std::getline(ss, label))
            throw DataError(path.string() + ": malformed pair line: " + line);
        if (label == "same")
            p.label = eval::PairLabel::Same;
        else if (label == "diff")
            p.label = eval::PairLabel::Different;
        else
            throw DataError(path.string() + ": unknown label: " + label);
        pairs.push_back(std::move(p));
    }
    if (pairs.empty()) throw DataError(path.string() + ": no pairs");
    return pairs;
}

void save_roc_csv(const std::filesystem::path& path, const eval::RocCurve& curve) {
    std::ostringstream out;
    out << "fpr,tpr,threshold\n";
    for (const auto& pt : curve.points)
        out << pt.fpr << "," << pt.tpr << "," << pt.threshold << "\n";
    atomic_write(path, out.str());
}

}  // namespace hw::bundle
