"""Lemma scans, the class-number cache and report rendering."""
