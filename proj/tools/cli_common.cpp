#include "cli_common.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "uaseg/error.hpp"

namespace fs = std::filesystem;

namespace uaseg::cli {

std::vector<fs::path> list_png_files(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".png")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    return files;
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& fn) {
    const int workers = std::max(1, jobs);
    if (workers == 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                next.store(count); // drain remaining work
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    const int n = std::min<std::size_t>(workers, count);
    pool.reserve(n);
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

namespace {

std::optional<std::string> read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

bool write_file_if_changed(const fs::path& path, const std::string& content) {
    if (auto existing = read_file(path); existing && *existing == content) return false;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    return true;
}

bool write_png_if_changed(const fs::path& path,
                          const std::function<void(const fs::path&)>& save_fn) {
    const fs::path tmp = path.string() + ".tmp";
    save_fn(tmp);
    const auto fresh = read_file(tmp);
    if (!fresh) throw IoError("failed to stage " + path.string());
    if (auto existing = read_file(path); existing && *existing == *fresh) {
        fs::remove(tmp);
        return false;
    }
    fs::rename(tmp, path);
    return true;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed) {
    if (seed) return *seed;
    std::random_device rd;
    const std::uint64_t generated =
        (static_cast<std::uint64_t>(rd()) << 32) ^ static_cast<std::uint64_t>(rd());
    std::cerr << "no --seed given; generated seed " << generated << "\n";
    return generated;
}

void ensure_output_distinct(const fs::path& input, const fs::path& output) {
    std::error_code ec;
    const fs::path in_c = fs::weakly_canonical(input, ec);
    const fs::path out_c = fs::weakly_canonical(output, ec);
    if (!in_c.empty() && in_c == out_c)
        throw InvalidParameterError("output directory must differ from input directory: " +
                                    output.string());
}

std::string sanitize_name(const std::string& name) {
    std::string out = name;
    for (char& c : out)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') c = '_';
    return out;
}

} // namespace uaseg::cli
