#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace codirector {

// Content-addressed blob store backing a run directory. Every artifact is a
// file named by the SHA-256 of its content, which is what makes selective
// regeneration and determinism checks possible.
class BlobStore {
public:
    explicit BlobStore(std::filesystem::path root);

    // Stores content and returns its reference (hex digest). Idempotent.
    std::string put(std::string_view content);

    bool contains(const std::string& ref) const;
    std::string get(const std::string& ref) const;  // throws if absent
    std::filesystem::path path_of(const std::string& ref) const;
    const std::filesystem::path& root() const { return root_; }

private:
    std::filesystem::path root_;
};

}  // namespace codirector
