/** Wire protocol and document payload shapes (mirror of the server schema). */
export {};
