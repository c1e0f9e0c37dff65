#include "uaseg/palette.hpp"

#include <fstream>
#include <map>
#include <sstream>

namespace uaseg {
namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::uint8_t parse_component(const std::string& field, const std::filesystem::path& path) {
    int v = -1;
    try {
        v = std::stoi(trim(field));
    } catch (const std::exception&) {
        throw IoError("palette CSV " + path.string() + ": bad color component '" + field + "'");
    }
    if (v < 0 || v > 255)
        throw IoError("palette CSV " + path.string() + ": component out of [0,255]");
    return static_cast<std::uint8_t>(v);
}

} // namespace

Palette::Palette(std::vector<PaletteEntry> entries) : entries_(std::move(entries)) {
    std::map<Rgb8, std::size_t> seen;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        auto [it, inserted] = seen.emplace(entries_[i].color, i);
        if (!inserted)
            throw InvalidInputError("palette: duplicate color for '" + entries_[i].name +
                                    "' and '" + entries_[it->second].name + "'");
    }
}

std::optional<std::size_t> Palette::index_of(Rgb8 color) const {
    for (std::size_t i = 0; i < entries_.size(); ++i)
        if (entries_[i].color == color) return i;
    return std::nullopt;
}

std::optional<Rgb8> Palette::color_of(const std::string& name) const {
    for (const auto& e : entries_)
        if (e.name == name) return e.color;
    return std::nullopt;
}

Palette load_palette_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open palette CSV " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw IoError("empty palette CSV " + path.string());
    if (trim(line) != "r,g,b,name")
        throw IoError("palette CSV " + path.string() + ": expected header 'r,g,b,name'");

    std::vector<PaletteEntry> entries;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        std::stringstream ss(line);
        std::string r, g, b, name;
        if (!std::getline(ss, r, ',') || !std::getline(ss, g, ',') ||
            !std::getline(ss, b, ',') || !std::getline(ss, name))
            throw IoError("palette CSV " + path.string() + ": malformed row '" + line + "'");
        entries.push_back(PaletteEntry{
            Rgb8{parse_component(r, path), parse_component(g, path), parse_component(b, path)},
            trim(name)});
    }
    if (entries.empty()) throw IoError("palette CSV " + path.string() + " has no entries");
    return Palette(std::move(entries));
}

void save_palette_csv(const std::filesystem::path& path, const Palette& palette) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write palette CSV " + path.string());
    out << "r,g,b,name\n";
    for (const auto& e : palette.entries())
        out << int(e.color.r) << ',' << int(e.color.g) << ',' << int(e.color.b) << ',' << e.name
            << '\n';
}

} // namespace uaseg
