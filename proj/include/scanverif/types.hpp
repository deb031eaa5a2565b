#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace scanverif {

// 16-bit unsigned PLC word.
using Word = std::uint16_t;

inline constexpr int kWordBits = 16;

enum class TypeKind : std::uint8_t { Invalid, Bool, Word, Array };

// BOOL, WORD or ARRAY[lo..hi] OF elem. Array bounds are compile-time
// constants with lo <= hi.
struct DataType {
    TypeKind kind = TypeKind::Invalid;
    int lo = 0;
    int hi = -1;
    std::shared_ptr<const DataType> elem;

    static DataType boolean() { return DataType{TypeKind::Bool, 0, -1, nullptr}; }
    static DataType word() { return DataType{TypeKind::Word, 0, -1, nullptr}; }
    static DataType array(DataType e, int lo, int hi) {
        DataType t;
        t.kind = TypeKind::Array;
        t.lo = lo;
        t.hi = hi;
        t.elem = std::make_shared<const DataType>(std::move(e));
        return t;
    }

    bool valid() const { return kind != TypeKind::Invalid; }
    bool is_bool() const { return kind == TypeKind::Bool; }
    bool is_word() const { return kind == TypeKind::Word; }
    bool is_array() const { return kind == TypeKind::Array; }
    bool is_scalar() const { return is_bool() || is_word(); }
    int array_len() const { return hi - lo + 1; }

    // Nondeterministic bit width: BOOL=1, WORD=16, arrays multiply.
    std::uint64_t bit_width() const {
        switch (kind) {
        case TypeKind::Bool: return 1;
        case TypeKind::Word: return kWordBits;
        case TypeKind::Array: return static_cast<std::uint64_t>(array_len()) * elem->bit_width();
        default: return 0;
        }
    }

    bool operator==(const DataType& o) const {
        if (kind != o.kind)
            return false;
        if (kind != TypeKind::Array)
            return true;
        return lo == o.lo && hi == o.hi && *elem == *o.elem;
    }
    bool operator!=(const DataType& o) const { return !(*this == o); }

    std::string str() const {
        switch (kind) {
        case TypeKind::Bool: return "BOOL";
        case TypeKind::Word: return "WORD";
        case TypeKind::Array:
            return "ARRAY[" + std::to_string(lo) + ".." + std::to_string(hi) + "] OF " + elem->str();
        default: return "<invalid>";
        }
    }
};

// Runtime value. Scalars carry their payload inline; arrays own their elements.
struct Value {
    TypeKind kind = TypeKind::Invalid;
    bool b = false;
    Word w = 0;
    std::vector<Value> elems;

    static Value of_bool(bool v) {
        Value x;
        x.kind = TypeKind::Bool;
        x.b = v;
        return x;
    }
    static Value of_word(Word v) {
        Value x;
        x.kind = TypeKind::Word;
        x.w = v;
        return x;
    }
    static Value zero_of(const DataType& t) {
        Value x;
        x.kind = t.kind;
        if (t.is_array()) {
            x.elems.resize(t.array_len());
            for (auto& e : x.elems)
                e = zero_of(*t.elem);
        }
        return x;
    }

    bool is_bool() const { return kind == TypeKind::Bool; }
    bool is_word() const { return kind == TypeKind::Word; }

    bool operator==(const Value& o) const {
        if (kind != o.kind)
            return false;
        switch (kind) {
        case TypeKind::Bool: return b == o.b;
        case TypeKind::Word: return w == o.w;
        case TypeKind::Array: return elems == o.elems;
        default: return true;
        }
    }
    bool operator!=(const Value& o) const { return !(*this == o); }

    std::string str() const {
        switch (kind) {
        case TypeKind::Bool: return b ? "TRUE" : "FALSE";
        case TypeKind::Word: {
            static const char* hex = "0123456789ABCDEF";
            std::string s = "16#";
            for (int i = 3; i >= 0; --i)
                s += hex[(w >> (4 * i)) & 0xF];
            return s;
        }
        case TypeKind::Array: {
            std::string s = "[";
            for (size_t i = 0; i < elems.size(); ++i) {
                if (i)
                    s += ", ";
                s += elems[i].str();
            }
            return s + "]";
        }
        default: return "<invalid>";
        }
    }
};

inline bool word_bit(Word w, int b) { return (w >> b) & 1u; }

inline Word set_word_bit(Word w, int b, bool v) {
    return v ? static_cast<Word>(w | (1u << b)) : static_cast<Word>(w & ~(1u << b));
}

}  // namespace scanverif
