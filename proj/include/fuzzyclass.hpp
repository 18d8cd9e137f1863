#ifndef FUZZYCLASS_HPP
#define FUZZYCLASS_HPP

#include "fuzzyclass/error.hpp"
#include "fuzzyclass/edit_distance.hpp"
#include "fuzzyclass/ctph.hpp"
#include "fuzzyclass/elf.hpp"
#include "fuzzyclass/binfeat.hpp"
#include "fuzzyclass/corpus.hpp"
#include "fuzzyclass/features_matrix.hpp"
#include "fuzzyclass/forest.hpp"
#include "fuzzyclass/evalsplit.hpp"
#include "fuzzyclass/classifier.hpp"
#include "fuzzyclass/pipeline.hpp"
#include "fuzzyclass/synthetic.hpp"

#endif // FUZZYCLASS_HPP
