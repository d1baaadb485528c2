"""Soft-set based unsupervised feature selection for texture features of CT-style images."""

from .imaging import (BinaryMask, GrayImage, add_noise, apply_mask, gaussian_filter, mean_filter,
                      median_filter, read_pgm, region_grow, snr, write_pgm)
from .roughset import mean_dependency, positive_region, relative_dependency, urr, usqr
from .softset import (ReductResult, SoftPartition, and_product, decompose, enumerate_reducts,
                      ind_measure, partition, partition_cardinality, significance, ssusqr)
from .tabular import (CategoricalTable, FeatureTable, equal_width_discretize, load_categorical,
                      read_table, write_table)
from .texture import extract_dataset, features, glcm, gldm, quantize

__version__ = "0.1.0"
