"""Generative semantic communication (GSC) pipeline simulator.

Subsystems:

- ``semgraph``: semantic graph model and task/perceptual subgraph induction
- ``pca`` / ``quant`` / ``payload``: embedding compression and wire payloads
- ``dct_codec``: block-DCT baseline source codec
- ``gf2`` / ``ldpc`` / ``alist`` / ``channel``: channel coding and AWGN simulation
- ``metrics`` / ``piqe`` / ``flops``: evaluation quantities
- ``adapters`` / ``pipeline``: extractor/generator seats and the end-to-end chain
- ``experiment`` / ``report``: sweep orchestration and Table-shaped reporting
- ``service`` / ``cli``: FastAPI wrapper and its thin-client CLI
"""

__version__ = "0.1.0"
