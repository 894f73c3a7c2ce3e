#include "codirector/store.hpp"

#include <fstream>

#include "codirector/backends.hpp"
#include "codirector/errors.hpp"

namespace codirector {

BlobStore::BlobStore(std::filesystem::path root) : root_(std::move(root)) {
    std::filesystem::create_directories(root_);
}

std::string BlobStore::put(std::string_view content) {
    const std::string ref = sha256_hex(content);
    const auto path = path_of(ref);
    if (!std::filesystem::exists(path)) {
        std::ofstream out(path, std::ios::binary);
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
    }
    return ref;
}

bool BlobStore::contains(const std::string& ref) const {
    return std::filesystem::exists(path_of(ref));
}

std::string BlobStore::get(const std::string& ref) const {
    std::ifstream in(path_of(ref), std::ios::binary);
    if (!in) throw ValidationError("blob reference does not resolve: " + ref);
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

std::filesystem::path BlobStore::path_of(const std::string& ref) const {
    return root_ / ref;
}

}  // namespace codirector
