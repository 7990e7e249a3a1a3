"""Relational tables as a fibered category: signatures, type domains,
tables and their morphisms, with joins and limits built from pushouts of
headers and pullbacks of keys."""
