#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "scud/decompose.hpp"

namespace scud {

enum class EntryKind { Whole, Fragment };

std::string kind_name(EntryKind kind);
EntryKind kind_from_name(const std::string& name);  // throws DataError

struct PoolEntry {
    std::string id;
    std::string origin_id;  // == id for wholes
    std::string utterance;
    Program program;
    NodePath path;  // empty for wholes
    EntryKind kind = EntryKind::Whole;
    std::string anon_template;  // cached print of anonymize(program)
    int depth = 1;              // cached depth(program)
};

PoolEntry make_whole(const std::string& id, const std::string& utterance, const Node& program,
                     const OperatorVocabulary& vocab);

// id becomes "<origin>#<dot-joined path>".
PoolEntry make_fragment(const PoolEntry& origin, const NodePath& path,
                        const std::string& utterance, const Node& program,
                        const OperatorVocabulary& vocab);

struct Pool {
    std::vector<PoolEntry> entries;  // file order

    const PoolEntry* find(const std::string& id) const;
    std::size_t whole_count() const;
    std::size_t fragment_count() const;
};

// JSONL, one entry per line, keys exactly:
// id, origin_id, utterance, program, path, kind, anon_template, depth.
// load re-derives anon_template and depth from the stored program and throws
// CacheMismatch when a stored value disagrees.
Pool load_pool(const std::string& file, const OperatorVocabulary& vocab);
void save_pool(const Pool& pool, const std::string& file);

// pool ∪ fragments; every fragment's origin_id must name a whole already in
// pool, and ids must stay unique.
Pool augment(const Pool& pool, const std::vector<PoolEntry>& fragments);

// Keeps wholes of depth >= min_depth and exactly the fragments whose origin
// whole survives.
Pool filter_by_depth(const Pool& pool, int min_depth);

struct PoolStats {
    std::size_t wholes = 0;
    std::size_t fragments = 0;
    std::map<int, std::size_t> whole_depth_histogram;
};

PoolStats pool_stats(const Pool& pool);

}  // namespace scud
