"""Maximin-share fair allocation of indivisible items on multigraphs."""
